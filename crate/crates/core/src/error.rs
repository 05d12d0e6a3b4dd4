use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An index, width or length violated a required inequality.
    #[error("bounds: {0}")]
    Bounds(String),

    /// A configuration value is outside its admissible range.
    #[error("parameter: {0}")]
    Parameter(String),

    /// Input is numerically degenerate (zero matrix, zero spectrum, empty subspaces).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Every difference subspace observed during training was empty.
    #[error("degenerate training: {0}")]
    DegenerateTraining(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The autocovariance system of an AR fit could not be solved.
    #[error("ill-conditioned autocovariance system at order {order}: {reason}")]
    Conditioning { order: usize, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("evaluation: {0}")]
    Evaluation(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 1,
            ErrorKind::Data => 2,
            ErrorKind::Numerical => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Data => "data",
            ErrorKind::Numerical => "numerical",
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parameter(_) => ErrorKind::Usage,
            Error::Bounds(_) | Error::Parse { .. } | Error::Evaluation(_) | Error::Io(_) => {
                ErrorKind::Data
            }
            Error::Degenerate(_)
            | Error::DegenerateTraining(_)
            | Error::Shape(_)
            | Error::Conditioning { .. } => ErrorKind::Numerical,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
