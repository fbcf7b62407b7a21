use thiserror::Error;

/// Errors raised by codecs, samplers and index structures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed stream: {0}")]
    Malformed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },
    #[error("tree kind mismatch: expected {expected}")]
    KindMismatch { expected: &'static str },
    #[error("empty class: {0}")]
    EmptyClass(String),
    #[error("tree has zero probability under the source")]
    ZeroProbability,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn malformed<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Malformed(msg.into()))
}
