use thiserror::Error;

use crate::C64;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),

    #[error("not a group action: {0}")]
    InvalidAction(String),

    #[error("malformed groupoid data: {0}")]
    MalformedGroupoid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("function is not positive definite: unit {unit}, quadratic form {form}")]
    NotPositiveDefinite {
        unit: usize,
        witness: Vec<C64>,
        form: C64,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("support condition violated: image of the point mass at {point} leaves its support")]
    SupportViolation { point: usize },

    #[error("operator does not commute with the right convolutions (defect {defect:e})")]
    NotInVonNeumann { defect: f64 },

    #[error("operator is not adjointable: entry ({row}, {col}) couples different fibers")]
    NotAdjointable { row: usize, col: usize },

    #[error("semidefinite program infeasible for every bound up to {cap:e}")]
    SdpInfeasible { cap: f64 },

    #[error("bisection reconstruction failed at unit {unit}: {reason}")]
    Reconstruction { unit: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
