use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error("matrix dimension must be positive")]
    EmptyMatrix,
    #[error("expected {expected} entries, got {actual}")]
    EntryCount { expected: usize, actual: usize },
    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (defect {defect:e} > tolerance {tol:e})")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },
    #[error("principal-minor enumeration limited to dimension 12, got {0}")]
    TooLarge(usize),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = CertError> = std::result::Result<T, E>;
