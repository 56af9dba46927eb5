use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    /// A materializing operation would exceed the configured guard.
    #[error("resource limit: {what} needs {needed}, limit is {limit}")]
    ResourceLimit {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("P_{m} does not divide Q_{q}: {reason}")]
    NotDivisible { m: u64, q: u64, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {msg}")]
    Format { line: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn index(msg: impl Into<String>) -> Self {
        Error::InvalidIndex(msg.into())
    }

    pub(crate) fn limit(what: impl Into<String>, needed: u128, limit: u128) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            needed,
            limit,
        }
    }
}
