use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller broke a documented precondition.
    #[error("argument error: {0}")]
    Argument(String),
    /// Malformed input data (files, rationals, unknown ids).
    #[error("parse error: {0}")]
    Parse(String),
    /// An enumeration would exceed its configured cap.
    #[error("size error: {what} exceeds cap {cap}")]
    Size { what: String, cap: usize },
    /// A property that the construction guarantees did not hold. Indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}
