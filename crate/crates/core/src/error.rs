use thiserror::Error;

use crate::stiefel::AdmissibilityReport;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("matrix is not Hermitian (||H - H*||_F = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not symplectic (||A A* - I||_F = {defect:e})")]
    NotSymplectic { defect: f64 },

    #[error("singular value {value} exceeds 1 + {tol:e}")]
    SingularValueAboveOne { value: f64, tol: f64 },

    #[error("block is not {n}-admissible ({reason})", n = .0.n, reason = .0.reason)]
    Inadmissible(Box<AdmissibilityReport>),

    #[error("SVD iteration did not converge")]
    NoConvergence,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
