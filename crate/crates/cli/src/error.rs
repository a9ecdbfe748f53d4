use thiserror::Error;

/// A command failure, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: malformed or invalid scenario, unknown figure, bad flags,
    /// unreadable or unwritable paths.
    #[error("{0}")]
    Validation(String),

    /// The numerics failed or a validation suite did not pass.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<qibench_core::Error> for CliError {
    fn from(e: qibench_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
