use thiserror::Error;

use crate::banachstone::Residuals;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("operation undefined on an empty matrix")]
    EmptyMatrix,

    #[error("matrix is not Hermitian (‖H - H*‖ = {deviation:.3e}, allowed {allowed:.3e})")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("spanning set is zero")]
    EmptySpan,

    #[error("identity is not in the span (distance {distance:.3e})")]
    NotUnital { distance: f64 },

    #[error("block ({row}, {col}) is not in the operator space (distance {distance:.3e})")]
    Membership {
        row: usize,
        col: usize,
        distance: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("wrong entry point: {0}")]
    WrongEntryPoint(String),

    #[error("not a complete isometry: {0}")]
    NotCompleteIsometry(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("decomposition failed verification: {residuals}")]
    DecompositionFailure { residuals: Residuals },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
