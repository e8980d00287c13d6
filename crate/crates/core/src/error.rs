use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("motion has no period: every amplitude or the frequency is zero")]
    NoMotion,

    #[error("sampling at {fps} fps cannot resolve {frequency} Hz motion (need fps > 2f)")]
    NyquistViolation { fps: f64, frequency: f64 },

    #[error("not enough samples: {0}")]
    NoSamples(String),

    #[error("{path}: malformed row {row}: {reason}")]
    Malformed {
        path: PathBuf,
        row: usize,
        reason: String,
    },

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("fit is flat (no detectable oscillation)")]
    FlatFit,

    #[error("every axis fit is flat")]
    AllFlat,

    #[error("sine refinement did not converge after {0} iterations")]
    NonConvergence(usize),

    #[error("target list is empty")]
    EmptyTargets,

    #[error("expected 6 axis fits, got {0}")]
    NoFit(usize),

    #[error("report has zero duration")]
    ZeroDuration,

    #[error("{path}: {reason}")]
    Validation { path: String, reason: String },

    #[error("{path}: {reason}")]
    Config { path: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the filesystem rather than by the inputs.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
