use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] weak_tt::Error),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 1 for broken invariants, 3 for capacity and sampling limits, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_resource_error() => 3,
            CliError::Core(weak_tt::Error::InvariantViolation(_)) => 1,
            _ => 2,
        }
    }
}
