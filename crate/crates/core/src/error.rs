use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular value decomposition did not converge")]
    DecompositionFailure,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is numerically singular")]
    Singular,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid problem: {0}")]
    Validation(String),

    #[error("exact solution of the linear system is zero")]
    ZeroSolution,

    #[error("rescaling direction maps to zero; oracle systems are inconsistent")]
    DegenerateDirection,

    #[error("oracle residual {achieved:e} exceeds target {target:e}")]
    PrecisionNotMet { achieved: f64, target: f64 },

    #[error("line search stalled (best step {alpha:e})")]
    Stall { alpha: f64 },

    #[error("insufficient data: {points} sample points, need at least {required}")]
    InsufficientData { points: usize, required: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
