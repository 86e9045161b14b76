use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] cohstat_core::Error),
}

impl CliError {
    /// Numerical failures map to 1, anything the caller can fix by changing
    /// inputs maps to 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                cohstat_core::Error::RouteMismatch { .. } | cohstat_core::Error::ToleranceNotReached { .. },
            ) => EXIT_VERIFICATION_FAILED,
            _ => EXIT_USAGE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
