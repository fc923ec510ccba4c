use thiserror::Error;

/// Errors raised by the arithmetic, matrix and spectrum routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("{what} = {value} is out of range (allowed: {allowed})")]
    OutOfRange {
        what: &'static str,
        value: String,
        allowed: String,
    },

    #[error("invalid digit word: {0}")]
    InvalidDigits(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn out_of_range(
        what: &'static str,
        value: impl ToString,
        allowed: impl Into<String>,
    ) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            allowed: allowed.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
