use serde::{Deserialize, Serialize};

/// Tolerances and iteration limits. Every field has a default and may be
/// overridden from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatfunConfig {
    /// `‖β² − 1‖` bound.
    pub beta_tol: f64,
    /// Relative bound on `‖H − H†‖` (or its pseudo-Hermitian analogue).
    pub herm_tol: f64,
    /// Relative bound on `‖r² − a‖` for square roots.
    pub sqrt_tol: f64,
    /// Relative bound on the odd residual of the transformed Hamiltonian.
    pub odd_tol: f64,
    /// Relative bound on eigenvalue displacement.
    pub drift_tol: f64,
    /// Bound on the (pseudo-)unitarity defect of the transform.
    pub unitarity_tol: f64,
    /// Bound on the odd part of the closed-form relativistic Hamiltonian.
    pub even_tol: f64,
    /// Largest accepted condition number of a matrix-function argument.
    pub cond_cap: f64,
    /// Smallest accepted `min |eig(H²)| / ‖H‖²`.
    pub gap_min: f64,
    pub db_max_iter: usize,
    pub db_tol: f64,
    pub power_iters: usize,
    pub power_tol: f64,
}

impl Default for MatfunConfig {
    fn default() -> Self {
        Self {
            beta_tol: 1e-14,
            herm_tol: 1e-12,
            sqrt_tol: 1e-10,
            odd_tol: 1e-10,
            drift_tol: 1e-9,
            unitarity_tol: 1e-10,
            even_tol: 1e-12,
            cond_cap: 1e12,
            gap_min: 1e-12,
            db_max_iter: 100,
            db_tol: 1e-14,
            power_iters: 20,
            power_tol: 1e-6,
        }
    }
}
