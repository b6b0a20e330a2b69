use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the model, the file loaders and the fitting routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid payload length {0} octets (expected 1..=2304)")]
    InvalidPayload(usize),

    #[error("unknown mode index {0} (expected 1..=8)")]
    UnknownMode(u8),

    #[error("mode {0} is not a mandatory control-response rate (expected mode 1, 3 or 5)")]
    NonMandatoryAckMode(u8),

    #[error("attempt index {index} out of range {min}..={max}")]
    AttemptOutOfRange { index: usize, min: usize, max: usize },

    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("no code spectrum loaded for code rate {0}")]
    MissingSpectrum(String),

    #[error("code spectrum data, line {line}: {message}")]
    SpectrumFormat { line: usize, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("insufficient data: need at least {needed} distinct records, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("rank-deficient design matrix: regressor `{0}` is collinear with the others")]
    RankDeficient(String),

    #[error("{source_name}, line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{source_name}: missing required key `{key}`")]
    MissingKey { source_name: String, key: String },

    #[error("unknown profile `{0}`")]
    UnknownProfile(String),

    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
