use thiserror::Error;

/// Errors raised by the solver, the transforms and the encoders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NFoldError {
    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid instance: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("{0}")]
    BoundTooLarge(&'static str),
    #[error("instance too large for oracle (box volume exceeds {cap})")]
    OracleTooLarge { cap: u128 },
    #[error("encoder limit exceeded: {0}")]
    EncoderCap(String),
    #[error("unsupported relation: {0}")]
    Relation(String),
    #[error("iteration cap of {cap} exceeded")]
    IterationCap { cap: usize },
    #[error("point is not feasible: {0}")]
    InfeasiblePoint(String),
    #[error("objective term cannot be serialized: {0}")]
    NotSerializable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = NFoldError> = std::result::Result<T, E>;

pub(crate) fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(NFoldError::Overflow("addition"))
}

pub(crate) fn sub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(NFoldError::Overflow("subtraction"))
}

pub(crate) fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(NFoldError::Overflow("multiplication"))
}
