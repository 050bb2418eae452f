use std::process::ExitCode;

use reserving::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// A file an earlier command should have produced is absent.
    #[error("missing artifact: {0}")]
    Missing(String),

    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Missing(_) => 3,
            CliError::Core(e) if e.is_data_error() => 2,
            CliError::Core(e) if e.is_numerical() => 4,
            CliError::Core(Error::Invalid(_) | Error::Shape(_)) => 2,
            CliError::Core(Error::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => 3,
            CliError::Core(_) => 1,
        })
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(Error::Json(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;
