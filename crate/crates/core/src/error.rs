use alloc::string::String;
use alloc::vec::Vec;

/// Errors reported by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("literal index {0} is not in the sensorium")]
    UnknownLiteral(u32),
    #[error("unknown literal name {0:?}")]
    UnknownName(String),
    #[error("literal {0} must be proper")]
    ImproperLiteral(u32),
    #[error("literals {0} and {1} belong to the same sensor")]
    SameSensor(u32, u32),
    #[error("set holds both a literal and its complement")]
    NotStarSelection,
    #[error("observation is not a complete *-selection")]
    IncompleteObservation,
    #[error("literal {0} is equivalent to its own complement")]
    SelfDual(u32),
    #[error("cubing cap exceeded: {what} = {value} > {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },
    #[error("literal {0} is not in the minimal set of the vertex")]
    InvalidFlip(u32),
    #[error("target halfspace is empty")]
    EmptyTarget,
    #[error("vertex set is not convex")]
    NotConvex,
    #[error("threshold {0} outside [0, 1/4]")]
    BadThreshold(f64),
    #[error("thresholds differ within the orbit of a sensor pair")]
    AsymmetricThreshold,
    #[error("decay parameter {0} outside [0, 1]")]
    DecayOutOfRange(f64),
    #[error("operation requires a {0} snapshot")]
    WrongKind(&'static str),
    #[error("triangle inequality fails on literals ({0}, {1}, {2})")]
    TriangleViolated(u32, u32, u32),
    #[error("graph has a directed cycle through {0:?}")]
    Cycle(Vec<u32>),
    #[error("map is not a poc morphism: {0}")]
    NotMorphism(String),
    #[error("sensoria do not match")]
    SensoriumMismatch,
    #[error("removed vertex {0} lies on the boundary")]
    BoundaryPuncture(usize),
    #[error("environment is not connected under its actions")]
    Disconnected,
    #[error("matrix shapes differ: {0} vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}
