use thiserror::Error;

/// Errors raised by the geometric, staircase and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point set is empty")]
    EmptySet,

    #[error("point has a non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("point must have at least one coordinate")]
    ZeroDimension,

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("shifted point {point} has a nonpositive component at index {index}")]
    NonPositiveShift { point: usize, index: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fixed-point iteration did not converge within {budget} steps (residual {residual:e})")]
    NoConvergence { budget: usize, residual: f64 },

    #[error("source point {index} is not strictly inside the bounding interval")]
    OutsideBounds { index: usize },

    #[error("staircases were built against different lower bounds or cones")]
    MismatchedBounds,

    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("decision point is not part of the materialized decision space")]
    UnknownDecision,

    #[error("scenario point is not part of the materialized uncertainty set")]
    UnknownScenario,

    #[error("invalid instance:\n  {}", .0.join("\n  "))]
    InvalidInstance(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
