use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },

    #[error("invalid quadrature grid: {0}")]
    Grid(String),

    #[error("kernel is not symmetric: |K[{i}][{j}] - K[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("eigenvalue {index} = {value:e} is not positive (rank deficient kernel)")]
    RankDeficient { index: usize, value: f64 },

    #[error("eigenvalues {index} and {} are degenerate ({value:e})", index + 1)]
    Degenerate { index: usize, value: f64 },

    #[error("degenerate constraint: {0}")]
    DegenerateConstraint(String),

    #[error("singular noise profile at component {0}")]
    SingularNoise(usize),

    #[error("degenerate coefficient sequence: {0}")]
    DegenerateSequence(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid signal: {0}")]
    Signal(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
