use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] laplace_core::Error),
    /// Replication ran but some gating check failed.
    #[error("{0} replication check(s) failed")]
    ReplicationFailed(usize),
}

impl CliError {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            line,
            message: message.into(),
        }
    }

    /// 1 for domain failures, 2 for usage, IO and parse errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(laplace_core::Error::UnknownDataset(_)) => 2,
            CliError::Domain(_) | CliError::ReplicationFailed(_) => 1,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => 2,
        }
    }
}
