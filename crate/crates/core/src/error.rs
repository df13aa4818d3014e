use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Out-of-range index, wrong length, mismatched variant or similar caller mistake.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The requested enumeration does not fit the exhaustive-evaluation budget.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A rejection sampler ran out of attempts.
    #[error("sampling failure: {what} after {attempts} attempts")]
    SamplingFailure { what: String, attempts: u64 },

    /// Internal consistency broken, e.g. an empty preimage where one is guaranteed.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Unknown backend, adversary or mechanism name.
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Capacity and sampling errors map to a distinct CLI exit code.
    pub fn is_resource_error(&self) -> bool {
        matches!(self, Error::Capacity(_) | Error::SamplingFailure { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
