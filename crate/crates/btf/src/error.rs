use std::path::PathBuf;

/// Failures surfaced by the command-line driver, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: x must be strictly increasing (row {row})")]
    Unsorted { path: PathBuf, row: usize },
    #[error("{path}: row {row}: {message}")]
    BadValue {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("sampler failed: {0}")]
    Conditioning(btf_core::Error),
    #[error(transparent)]
    Model(btf_core::Error),
    #[error("{0}")]
    Failed(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Unsorted { .. } => 2,
            CliError::BadValue { .. } => 3,
            CliError::Conditioning(_) => 4,
            CliError::Model(_) | CliError::Failed(_) | CliError::Io { .. } | CliError::Csv { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        CliError::Csv {
            path: path.into(),
            source,
        }
    }
}

impl From<btf_core::Error> for CliError {
    fn from(e: btf_core::Error) -> Self {
        match e.root() {
            btf_core::Error::Conditioning { .. } => CliError::Conditioning(e),
            _ => CliError::Model(e),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
