//! Crate-wide error type.
//!
//! Errors carry enough context to be actionable (paths, line numbers,
//! cell coordinates) and map onto three coarse categories so callers
//! such as the CLI can pick an exit code without matching every variant.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse error family, used by the CLI for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad configuration or arguments.
    Config,
    /// Invalid, missing, or malformed input data.
    Data,
    /// Failure while computing or writing results.
    Runtime,
}

impl std::fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorCategory::Config => write!(f, "config"),
            ErrorCategory::Data => write!(f, "data"),
            ErrorCategory::Runtime => write!(f, "runtime"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file {path}: {source}")]
    MissingFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    GridParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("failed to parse {path}: {message}")]
    ManifestParse { path: PathBuf, message: String },

    #[error("validation: {0}")]
    Validation(String),

    #[error("config: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate table: {0}")]
    DegenerateTable(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Runtime(String),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) => ErrorCategory::Config,
            Error::MissingFile { .. }
            | Error::GridParse { .. }
            | Error::ManifestParse { .. }
            | Error::Validation(_)
            | Error::InsufficientData(_)
            | Error::DegenerateTable(_) => ErrorCategory::Data,
            Error::Shape(_) | Error::Unsupported(_) | Error::Io { .. } | Error::Runtime(_) => {
                ErrorCategory::Runtime
            }
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
