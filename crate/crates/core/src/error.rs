use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed PPM/PGM content. `offset` is the byte position where
    /// parsing stopped.
    #[error("netpbm: {message} (at byte {offset})")]
    Netpbm { offset: usize, message: String },

    #[error("wav: {0}")]
    Wav(String),

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("template: {0}")]
    Template(String),

    #[error("unknown word label '{0}'")]
    UnknownLabel(String),

    #[error("template library is empty")]
    EmptyLibrary,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infinite depth: disparity is zero")]
    InfiniteDepth,

    #[error("point at depth {0} mm is not in front of the camera")]
    BehindCamera(f64),

    #[error("obstacle disparity {disparity} exceeds maximum {max}")]
    DisparityOutOfRange { disparity: usize, max: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn mismatch(expected: impl ToString, actual: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    /// True when the error stems from reading or parsing an input artifact,
    /// as opposed to a numeric or contract violation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Netpbm { .. }
                | Error::Wav(_)
                | Error::Calibration(_)
                | Error::Template(_)
                | Error::UnknownLabel(_)
                | Error::EmptyLibrary
        )
    }
}
