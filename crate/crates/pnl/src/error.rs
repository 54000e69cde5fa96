use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("sort error: {0}")]
    Sort(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("permission violation: {0}")]
    Permission(String),
    #[error("capture typing failed: {0}")]
    Capture(String),
    #[error("unsound: {0}")]
    Unsound(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no fresh atom available: {0}")]
    Exhausted(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

#[allow(dead_code)]
pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
