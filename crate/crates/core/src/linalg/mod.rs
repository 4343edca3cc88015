//! Complex dense and sparse kernels shared by every other module.
//!
//! Dense matrices are row-major; sparse operators are compressed-row with
//! unique coordinates. Norms route small problems through a dense SVD and
//! large ones through a Krylov method on the Gram operator.

mod dense;
mod norms;
mod sparse;

use thiserror::Error;

pub use dense::ComplexMatrix;
pub use norms::{
    column_norm, hermitian_eigenvalues, hermitian_sqrt_norm, operator_norm, operator_norm_iterative, row_column_max,
    row_norm, trace_norm, OperatorRef, DEFAULT_TOL, DENSE_CROSSOVER, HERMITIAN_TOL, MAX_MATVECS,
};
pub use num_complex::Complex64;
pub use sparse::SparseOperator;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("coordinate {index:?} outside shape {shape:?}")]
    IndexOutOfRange {
        index: (usize, usize),
        shape: (usize, usize),
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error(
        "norm iteration did not converge after {iterations} products (estimate {estimate}, residual {residual:e})"
    )]
    NotConverged {
        iterations: usize,
        estimate: f64,
        residual: f64,
    },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

/// Complex scalar shorthand.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
