use std::path::PathBuf;

use thiserror::Error;

/// Error type used by operations in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or an operation applied to incompatible shapes.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    /// Data that violates an invariant (non-finite values, ragged rows, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),
    /// A named preset or resource that does not exist.
    #[error("not found: {0}")]
    NotFound(String),
    /// A file that failed to parse, with its location.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        /// 1-based line number.
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Convenient alias for results produced by this crate.
pub type Result<T> = std::result::Result<T, Error>;
