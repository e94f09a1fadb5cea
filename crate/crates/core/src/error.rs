use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters for a generator, calibration or experiment.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input data (ground-set files, duplicate line keys, ...).
    #[error("input error: {0}")]
    Input(String),

    /// Bad command line or unknown identifier.
    #[error("usage error: {0}")]
    Usage(String),

    /// A computation would exceed its configured size guard.
    #[error("resource guard exceeded: {0}")]
    Resource(String),

    /// An exact inequality or identity that is a theorem failed to hold.
    /// This always indicates a bug in the implementation.
    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Assertion(_) => 3,
            Error::Resource(_) => 4,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
