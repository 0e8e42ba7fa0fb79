use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset path not found: {}", .0.display())]
    MissingPath(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument `{name}`: {message}")]
    InvalidArgument { name: &'static str, message: String },

    #[error("corpus has no labeled documents")]
    NoLabeledDocuments,

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("duplicate arrival index {0}")]
    DuplicateArrival(usize),

    #[error("unsupported selection method `{0}`")]
    UnsupportedMethod(String),

    #[error("vector space mismatch: model expects {expected}, got {found}")]
    SpaceMismatch { expected: String, found: String },

    #[error("operation requires a linear kernel")]
    NonLinearKernel,

    #[error("length mismatch: {left} predictions vs {right} truths")]
    LengthMismatch { left: usize, right: usize },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("retraining set for generation {generation} collapsed to a single class")]
    DegenerateRetrainSet { generation: usize },

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn format(what: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            what,
            message: message.into(),
        }
    }

    /// Short stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingPath(_) => "missing-path",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::InvalidArgument { .. } => "invalid-argument",
            Error::NoLabeledDocuments => "no-labeled-documents",
            Error::SingleClass => "single-class",
            Error::DuplicateArrival(_) => "duplicate-arrival",
            Error::UnsupportedMethod(_) => "unsupported-method",
            Error::SpaceMismatch { .. } => "space-mismatch",
            Error::NonLinearKernel => "non-linear-kernel",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::EmptyMatrix => "empty-matrix",
            Error::DegenerateRetrainSet { .. } => "degenerate-retrain-set",
            Error::Format { .. } => "format",
        }
    }
}
