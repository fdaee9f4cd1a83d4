use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pooling, statistics, regression and
/// evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Structurally invalid input: empty series, non-finite values, too few
    /// samples for the requested operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration value outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input values outside the mathematical domain of an operation, such as a
    /// nonpositive score passed to the harmonic mean.
    #[error("domain error: {0}")]
    Domain(String),

    /// A correlation coefficient is undefined because one side has no variance.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// Inputs that are well-formed but carry no usable information, e.g.
    /// a logistic fit against constant targets.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A pooling failure attributed to a specific video.
    #[error("video `{video}`: {source}")]
    Video {
        video: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: u64, message: String },

    /// Dataset assembly failed because ids did not match across input files.
    #[error("unmatched video ids: {0}")]
    UnmatchedIds(String),

    /// A serialized model that does not conform to the expected versioned layout.
    #[error("model format: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn in_video(self, video: &str) -> Self {
        Error::Video {
            video: video.to_string(),
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through video attribution.
    pub fn root(&self) -> &Error {
        match self {
            Error::Video { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
