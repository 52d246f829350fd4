use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("label vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("block label {0} is unused; labels must be contiguous")]
    LabelGap(usize),
    #[error("label {label} exceeds the number of blocks {k}")]
    LabelOutOfRange { label: usize, k: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} did not converge within {1} iterations")]
    NonConvergence(&'static str, usize),
    #[error("assortativity constraint violated: {0}")]
    InvariantViolation(String),
    #[error("infeasible generator spec: {0}")]
    Infeasible(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
