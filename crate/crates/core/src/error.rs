use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the optimizer, the scheduling model, or the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range for dimension {dims}")]
    Index { index: usize, dims: usize },

    #[error("objective returned NaN for source {source_index}")]
    Evaluation { source_index: usize },

    #[error("degenerate population: total fitness is zero")]
    DegeneratePopulation,

    #[error("iteration {iteration}: {inner}")]
    AtIteration { iteration: usize, inner: Box<Error> },

    #[error("trial {trial}: {inner}")]
    AtTrial { trial: usize, inner: Box<Error> },

    #[error("cannot decode key vector: {0}")]
    Decode(String),

    #[error("layout error: {0}")]
    Layout(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Strips iteration/trial context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtIteration { inner, .. } | Error::AtTrial { inner, .. } => inner.root(),
            other => other,
        }
    }

    /// Process exit code: 2 usage/validation, 3 I/O, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Io { .. } | Error::Csv(_) => 3,
            Error::Evaluation { .. } | Error::DegeneratePopulation => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
