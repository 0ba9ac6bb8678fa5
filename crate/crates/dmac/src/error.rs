use std::io;
use std::path::PathBuf;

/// Failure of a subcommand, carrying its process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("{0}")]
    Validation(dmac_core::Error),
    #[error("{0}")]
    Numerical(dmac_core::Error),
    #[error("verification failed: {0}")]
    Verifier(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 2 parse/usage, 3 validation, 4 numerical failure, 5 verifier
    /// failure, 1 for output errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Verifier(_) => 5,
            CliError::Write { .. } => 1,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl From<dmac_core::Error> for CliError {
    fn from(e: dmac_core::Error) -> Self {
        use dmac_core::Error::*;
        match e {
            ConvergenceFailure { .. } | PowerViolation { .. } => CliError::Numerical(e),
            _ => CliError::Validation(e),
        }
    }
}
