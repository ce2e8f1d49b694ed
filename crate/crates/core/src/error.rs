use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    #[error("uniqueness violation: {0}")]
    Uniqueness(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("inconclusive at cutoff: {0}")]
    Inconclusive(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
