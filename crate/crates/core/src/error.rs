use thiserror::Error;

/// Errors raised by the arithmetic layers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation was applied outside its mathematical domain
    /// (inverting zero, dividing by the zero polynomial, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// User-supplied parameters violate a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// Malformed field or polynomial literal.
    #[error("parse error at offset {position}: unexpected token `{token}` in `{input}`")]
    Parse {
        input: String,
        token: String,
        position: usize,
    },

    /// Requested work exceeds the configured budget.
    #[error("resource budget exceeded: requires {required} work units, budget is {budget}")]
    Budget { required: u128, budget: u128 },

    /// A proven identity failed to hold; indicates a bug, never bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
