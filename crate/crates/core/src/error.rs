use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A user-supplied parameter is outside its admissible range.
    #[error("invalid {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// Mesh input that fails the conformity or orientation checks.
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("iterative solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("matrix is not positive definite: negative curvature {curvature:.3e} at iteration {iteration}")]
    Indefinite { iteration: usize, curvature: f64 },

    #[error("Cholesky factorisation failed for the {0} matrix (not symmetric positive definite)")]
    NotPositiveDefinite(&'static str),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("matrix is not symmetric (max |A - A^T| = {0:.3e})")]
    NotSymmetric(f64),

    #[error("dense computation needs {dofs} unknowns but is capped at {cap}")]
    TooLarge { dofs: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter { name, message: message.into() }
    }

    /// Whether the error stems from bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::InvalidMesh(_) | Error::Json(_)
        )
    }
}
