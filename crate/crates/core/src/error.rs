use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("divisor is not Q-Cartier on cone {cone:?}")]
    NotQCartier { cone: Vec<usize> },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported instance: {0}")]
    Unsupported(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("iteration cap {0} exceeded")]
    IterationCap(usize),
    #[error("model is not projective over the base: {0}")]
    NotProjective(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
