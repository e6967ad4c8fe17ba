use std::path::PathBuf;

use crate::oracle::OracleError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite entry {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error(
        "matrix is not symmetric: |a({row},{col}) - a({col},{row})| = {diff:e} exceeds {tol:e}"
    )]
    Asymmetric {
        row: usize,
        col: usize,
        diff: f64,
        tol: f64,
    },

    #[error("parse error in {}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("enumeration infeasible: {mode} at n = {n} needs {required:.3e} orders (limit n <= {max_n})")]
    Infeasible {
        mode: &'static str,
        n: usize,
        max_n: usize,
        required: f64,
    },

    #[error("no matrix with {neg} negative eigenvalue(s) and positive diagonal found in {attempts} attempts (n = {n})")]
    GenerationFailed {
        n: usize,
        neg: usize,
        attempts: usize,
    },

    #[error("incomplete grid: {0}")]
    IncompleteGrid(String),

    #[error("eigensolver failed to converge on a {0}x{0} matrix")]
    NoConvergence(usize),

    #[error(transparent)]
    Oracle(#[from] OracleError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
