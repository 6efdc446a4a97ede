//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("jet operands disagree: dim/order ({0}, {1}) vs ({2}, {3})")]
    JetMismatch(usize, usize, usize, usize),
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("jet order {0} outside the supported range 0..=4")]
    OrderOutOfRange(usize),
    #[error("multi-index degree {degree} exceeds jet order {order}")]
    DegreeExceedsOrder { degree: usize, order: usize },
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown identifier `{name}` at line {line}, column {col}")]
    UnknownIdentifier { name: String, line: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("inconsistent duplicate component g {i} {j}")]
    InconsistentComponent { i: usize, j: usize },
    #[error("missing domain for coordinate `{0}`")]
    MissingDomain(String),
    #[error("unknown metric `{name}`; available: {available}")]
    UnknownMetric { name: String, available: String },
    #[error("point {0:?} lies outside the sampling domain")]
    OutsideDomain(Vec<f64>),
    #[error("singular metric (|det g| <= 1e-12) at point {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("tensor slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slot variance mismatch: {0}")]
    VarianceMismatch(String),
    #[error("cyclic sum takes 3 or 4 slots, got {0}")]
    BadCycleLength(usize),
    #[error("{kind} tensor needs dimension >= {min}, got {dim}")]
    DimensionTooSmall {
        kind: String,
        min: usize,
        dim: usize,
    },
    #[error("mutation index {index} out of range ({terms} terms)")]
    BadMutation { index: usize, terms: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
