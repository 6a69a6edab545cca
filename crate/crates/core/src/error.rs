use thiserror::Error;

/// Failures raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain has no interior cells")]
    EmptyDomain,
    #[error("boundary cloud is empty")]
    EmptyCloud,
    #[error("resolution too coarse: {0}")]
    Resolution(String),
    #[error("function carries no boundary trace")]
    NoTrace,
    #[error("function carries no modulus of continuity")]
    NoModulus,
    #[error("field does not vanish on the outer layer of its grid box")]
    Support,
    #[error("degenerate starting function: {0}")]
    DegenerateStart(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
