//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by operators, dense kernels, pole selection and solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied inconsistent or out-of-domain input.
    #[error("invalid input: {0}")]
    Input(String),

    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// Matrix Market parse failure, with the 1-based line number.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Sparse Cholesky factorization failed (matrix not SPD).
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// An iterative kernel did not converge within its iteration cap.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Projected Lyapunov equation has λᵢ + λⱼ ≈ 0.
    #[error("singular projected Lyapunov equation: min eigenvalue pair sum {0:e}")]
    SingularEquation(f64),

    /// Spectral estimate produced a non-positive lower bound.
    #[error("operator does not look positive definite: smallest Ritz value {0:e}")]
    NotPositiveDefinite(f64),

    /// API misuse (for example detaching a window that was not retained).
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
