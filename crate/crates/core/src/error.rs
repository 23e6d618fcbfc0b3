use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by the exit-code class the command-line front end
/// maps them to (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {op} got {left:?} and {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op}: empty input")]
    Empty { op: &'static str },

    #[error("degenerate vector: norm {norm:e} is below {threshold:e}")]
    DegenerateNorm { norm: f64, threshold: f64 },

    #[error("non-finite value produced by {op}")]
    NonFinite { op: &'static str },

    #[error("{kind} expects {expected} components, got {got}")]
    Arity {
        kind: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed model file: {message}")]
    MalformedModel { path: PathBuf, message: String },

    #[error("{path}: unsupported model format version {found} (expected {expected})")]
    ModelVersion {
        path: PathBuf,
        found: u64,
        expected: u64,
    },

    #[error("{path}: parameter {tensor} has shape {found:?}, config implies {expected:?}")]
    ModelShape {
        path: PathBuf,
        tensor: &'static str,
        found: (usize, usize),
        expected: (usize, usize),
    },

    #[error("training diverged at epoch {epoch}, batch {batch}, triplet {triplet:?}: {message}")]
    Diverged {
        epoch: usize,
        batch: usize,
        triplet: (usize, usize, usize),
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error: 2 configuration, 3 I/O or file
    /// format, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Geometry(_) | Error::Arity { .. } => 2,
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::MalformedModel { .. }
            | Error::ModelVersion { .. }
            | Error::ModelShape { .. } => 3,
            Error::Shape { .. }
            | Error::Empty { .. }
            | Error::DegenerateNorm { .. }
            | Error::NonFinite { .. }
            | Error::Diverged { .. } => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
