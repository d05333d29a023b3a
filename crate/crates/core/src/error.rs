use thiserror::Error;

/// Errors produced by construction, validation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (defect {defect:.3e}, allowed {allowed:.3e})")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error("matrix is not unitary (defect {defect:.3e}, allowed {allowed:.3e})")]
    NotUnitary { defect: f64, allowed: f64 },

    #[error("not a valid quantum state: {0}")]
    NotAState(String),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
