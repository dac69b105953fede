use thiserror::Error;

/// Exit status of the binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const NON_CONVERGENCE: i32 = 3;
    /// `validate` ran to completion but at least one comparison failed.
    pub const CHECK_FAILED: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Infeasible(String),

    #[error("{0}")]
    NonConvergence(String),

    #[error("{0}")]
    CheckFailed(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => exit::USAGE,
            CliError::Infeasible(_) => exit::INFEASIBLE,
            CliError::NonConvergence(_) => exit::NON_CONVERGENCE,
            CliError::CheckFailed(_) => exit::CHECK_FAILED,
        }
    }
}

impl From<lnsurrogate::Error> for CliError {
    fn from(e: lnsurrogate::Error) -> Self {
        let msg = e.to_string();
        if e.is_infeasible() {
            CliError::Infeasible(msg)
        } else if e.is_numerical() {
            CliError::NonConvergence(msg)
        } else {
            CliError::Usage(msg)
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
