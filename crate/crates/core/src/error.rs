use std::path::PathBuf;

/// Errors produced by graph ingestion, scoring, and system construction.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("length mismatch: expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("weight matrix is not symmetric at ({i}, {j}): {w_ij} vs {w_ji}")]
    Asymmetric {
        i: usize,
        j: usize,
        w_ij: f64,
        w_ji: f64,
    },
    #[error("weight matrix has nonzero diagonal entry at {0}")]
    NonzeroDiagonal(usize),
    #[error("index {index} out of range for {len} entries")]
    OutOfRange { index: usize, len: usize },
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
