//! Experiment harness, file formats and oracle self-tests built on
//! [`snapmem_core`].

pub mod formats;
pub mod harness;
pub mod selftest;
