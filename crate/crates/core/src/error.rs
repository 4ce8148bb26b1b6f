//! Error type shared by the numeric modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("field shape {got:?} does not match grid shape {want:?}")]
    ShapeMismatch { want: (usize, usize), got: (usize, usize) },

    #[error("operation requires a doubly periodic chart, got {chart}")]
    NotPeriodic { chart: &'static str },

    #[error("chart carries no embedding samples")]
    NoEmbedding,

    #[error("eigensolver failed: {0}")]
    Eig(String),

    #[error("biorthogonalization residual {resid:.3e} above tolerance {tol:.3e}")]
    Biortho { resid: f64, tol: f64 },

    #[error("eigenvalue pairing deviation {dev:.3e} above tolerance {tol:.3e}")]
    Pairing { dev: f64, tol: f64 },

    #[error("action route disagreement {dev:.3e} above tolerance {tol:.3e}")]
    ActionRoutes { dev: f64, tol: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
