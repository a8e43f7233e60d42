use std::path::PathBuf;

use faultloc_core::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: faultloc_core::Error,
    },

    #[error(transparent)]
    Core(#[from] faultloc_core::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 validation, 3 I/O, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        let kind = match self {
            CliError::Io { .. } => return 3,
            CliError::Usage(_) => return 2,
            CliError::Input { source, .. } | CliError::Core(source) => source.kind(),
        };
        match kind {
            ErrorKind::Numerical => 4,
            ErrorKind::Validation | ErrorKind::NoFault => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
