use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported Hadamard order {order}: {reason} (only Sylvester power-of-2 orders >= 2 are constructed)")]
    UnsupportedOrder { order: usize, reason: &'static str },

    #[error("invalid Hadamard matrix: {0}")]
    InvalidHadamard(String),

    #[error("invalid pattern set: {0}")]
    InvalidPatternSet(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid timing: {0}")]
    InvalidTiming(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("frame is not the product of a full static revolution: {0}")]
    InconsistentFrame(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format { path: path.into(), message: message.into() }
    }
}
