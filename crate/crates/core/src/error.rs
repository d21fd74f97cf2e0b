use thiserror::Error;

/// Errors raised by the goodpair library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must live in the same ambient ring or shape do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    /// An operation was called outside its documented domain.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A textual form (rational, linear form, matrix entry) could not be read.
    #[error("parse error: {0}")]
    Parse(String),
    /// A hypothesis of a numeric probe does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A checkpoint or data file has an unsupported format/version.
    #[error("incompatible file: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
