//! Matrix functions, the numerical Eriksen transform and the closed-form
//! relativistic FW Hamiltonian.

mod block;
mod config;
mod convergence;
mod export;
mod func;
mod norm;
mod transform;

pub use block::{
    anticommutator, beta_conjugate, beta_left, beta_right, commutator, even_part, odd_part,
    BlockOperator, FwParts, HermClass,
};
pub use config::MatfunConfig;
pub use convergence::{
    hbar_convergence_study, least_squares, LineFit, ModelFamily, ModelInstance, SlopeReport,
};
pub use export::MatrixJson;
pub use func::{
    hermitian_eigen, matrix_inv_sqrt, matrix_sqrt, pseudo_hermitian_eigen, spectrum_info,
    PencilEigen, SpectrumInfo,
};
pub use norm::{relative_defect, spectral_norm, spectral_norm_with};
pub use transform::{eriksen_transform_numeric, relfw_hamiltonian_numeric, FwNumericResult};

use crate::CMat;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatfunError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("beta is not a Hermitian involution (defect {0:e})")]
    BadBeta(f64),
    #[error("operator is not {class:?} (defect {defect:e})")]
    ClassMismatch { class: HermClass, defect: f64 },
    #[error("eigenvalue {re:e}{im:+e}i is not in the open right half-plane")]
    SpectrumNotPositive { re: f64, im: f64 },
    #[error("condition number {cond:e} exceeds cap {cap:e}")]
    IllConditioned { cond: f64, cap: f64 },
    #[error("Denman-Beavers iteration did not converge in {0} steps")]
    NotConverged(usize),
    #[error("eigenvalue computation failed")]
    EigenFailure,
    #[error("metric beta*H is not positive definite")]
    IndefiniteMetric,
    #[error("spectral gap of H^2 is {gap:e}, below {min:e}")]
    SpectralGapTooSmall { gap: f64, min: f64 },
    #[error("kernel 2 eps^2 + {{eps, M}} is singular")]
    SingularKernel,
    #[error("{what}: {value:e} exceeds {tol:e}")]
    Postcondition {
        what: &'static str,
        value: f64,
        tol: f64,
    },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("model construction failed: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, MatfunError>;

pub(crate) fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub(crate) fn check_square(a: &CMat) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(MatfunError::NotSquare(a.nrows(), a.ncols()));
    }
    Ok(a.nrows())
}

pub(crate) fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * crate::Complex64::new(0.5, 0.0)
}
