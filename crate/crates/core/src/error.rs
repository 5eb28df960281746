use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("argument {0} is too close to a pole of gamma")]
    Pole(String),
    #[error("sin(pi z) argument {0} is too close to an integer")]
    NearInteger(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("series did not converge after {0} terms")]
    NotConverged(usize),
    #[error("rejection budget of {0} draws exhausted")]
    RejectionBudget(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
