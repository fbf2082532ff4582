use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid motif: {0}")]
    InvalidMotif(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration of {work} items exceeds the limit of {limit}")]
    FeasibilityExceeded { work: String, limit: u64 },

    #[error("overlap polynomial for k={k} disagrees with the table at n={n}")]
    VerificationFailed { k: usize, n: u64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidMotif(_) | Error::Domain(_) | Error::Json(_) => 2,
            Error::FeasibilityExceeded { .. } => 3,
            Error::CheckFailed(_) => 4,
            Error::VerificationFailed { .. } | Error::Io { .. } | Error::Csv(_) => 1,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
