//! Snapshot memory for discrete binary agents: weak poc sets, their dual
//! cubings, snapshots that learn implications from observation streams,
//! propagation-based planning, and simulated environments.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cubing;
pub mod dba;
pub mod envs;
pub mod error;
pub mod graph;
pub mod literal;
pub mod pocset;
pub mod propagation;
pub mod snapshot;

pub use cubing::{dual_map, Cubing, CubingLimits, Realization, VertexId};
pub use dba::{Agent, AgentConfig, AgentLayout, Controller, CycleRecord, LearnerKind, SensorPlan};
pub use envs::{err, ground_truth, DirMatrix, Environment, TruthMode};
pub use error::Error;
pub use graph::PocGraph;
pub use literal::{Degree, LitSet, Literal, Sensorium, StarSelection};
pub use pocset::{PairRelation, PocMorphism, WeakPocSet};
pub use propagation::{ContextMap, GeneralizedAction, PlanDecision};
pub use snapshot::{Constraint, Snapshot, SnapshotKind, Violation, Weights};
