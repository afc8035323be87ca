use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Endpoints or groupoids do not match.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured enumeration bound was exceeded.
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// An internal self-check failed; this indicates a bug, not bad input.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
