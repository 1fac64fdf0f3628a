use limsup_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// 0 success, 1 usage or validation, 2 resource cap, 3 internal invariant.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::ResourceCap { .. }) => 2,
            CliError::Core(CoreError::Invariant(_)) => 3,
            _ => 1,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
