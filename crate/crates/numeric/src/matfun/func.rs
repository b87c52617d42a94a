use nalgebra::linalg::{Cholesky, Schur, SymmetricEigen};

use super::block::{beta_left, beta_right};
use super::{
    check_square, hermitian_part, identity, norm::spectral_norm, MatfunConfig, MatfunError, Result,
};
use crate::{CMat, Complex64};

/// Eigenvalues of a Hermitian matrix in ascending order with matching
/// eigenvector columns. Only the Hermitian part of `a` is used.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(a.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

fn is_hermitian(a: &CMat, cfg: &MatfunConfig) -> bool {
    let scale = spectral_norm(a);
    spectral_norm(&(a - a.adjoint())) <= cfg.herm_tol * scale.max(f64::MIN_POSITIVE)
}

/// Spectrum summary used for precondition checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumInfo {
    pub hermitian: bool,
    pub eigenvalues: Vec<Complex64>,
    pub min_abs: f64,
    pub max_abs: f64,
}

impl SpectrumInfo {
    pub fn condition(&self) -> f64 {
        if self.min_abs == 0.0 {
            f64::INFINITY
        } else {
            self.max_abs / self.min_abs
        }
    }
}

pub fn spectrum_info(a: &CMat, cfg: &MatfunConfig) -> Result<SpectrumInfo> {
    check_square(a)?;
    let hermitian = is_hermitian(a, cfg);
    let eigenvalues: Vec<Complex64> = if hermitian {
        hermitian_eigen(a)
            .0
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect()
    } else {
        let schur =
            Schur::try_new(a.clone(), f64::EPSILON, 10_000).ok_or(MatfunError::EigenFailure)?;
        schur
            .eigenvalues()
            .ok_or(MatfunError::EigenFailure)?
            .iter()
            .copied()
            .collect()
    };
    let min_abs = eigenvalues
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    let max_abs = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(SpectrumInfo {
        hermitian,
        eigenvalues,
        min_abs,
        max_abs,
    })
}

fn check_right_half_plane(info: &SpectrumInfo, cfg: &MatfunConfig) -> Result<()> {
    if let Some(z) = info.eigenvalues.iter().find(|z| z.re <= 0.0) {
        return Err(MatfunError::SpectrumNotPositive { re: z.re, im: z.im });
    }
    let cond = info.condition();
    if cond > cfg.cond_cap {
        return Err(MatfunError::IllConditioned {
            cond,
            cap: cfg.cond_cap,
        });
    }
    Ok(())
}

fn hermitian_function(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, vectors) = hermitian_eigen(a);
    let mut scaled = vectors.clone();
    for (j, &x) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f(x));
    }
    scaled * vectors.adjoint()
}

/// `ln |det|` from an LU factorization.
fn inverse_and_log_det(a: &CMat) -> Result<(CMat, f64)> {
    let lu = a.clone().lu();
    let inv = lu.try_inverse().ok_or(MatfunError::NotConverged(0))?;
    let log_det = lu.u().diagonal().iter().map(|d| d.norm().ln()).sum();
    Ok((inv, log_det))
}

/// Scaled Denman-Beavers iteration. Returns `(sqrt(a), a^(-1/2))`.
fn denman_beavers(a: &CMat, cfg: &MatfunConfig) -> Result<(CMat, CMat)> {
    let n = a.nrows() as f64;
    let mut y = a.clone();
    let mut z = identity(a.nrows());
    let mut prev = f64::INFINITY;
    for k in 0..cfg.db_max_iter {
        let (yi, ly) = inverse_and_log_det(&y)?;
        let (zi, lz) = inverse_and_log_det(&z)?;
        let mu = if prev > 1e-2 {
            (-(ly + lz) / (2.0 * n)).exp()
        } else {
            1.0
        };
        let half = Complex64::new(0.5, 0.0);
        let (m, mi) = (Complex64::new(mu, 0.0), Complex64::new(1.0 / mu, 0.0));
        let y_next = (&y * m + zi * mi) * half;
        let z_next = (&z * m + yi * mi) * half;
        let delta = (&y_next - &y).norm() / y_next.norm();
        y = y_next;
        z = z_next;
        if delta <= cfg.db_tol || (k > 3 && delta < 1e-10 && delta >= prev) {
            return Ok((y, z));
        }
        prev = delta;
    }
    Err(MatfunError::NotConverged(cfg.db_max_iter))
}

#[derive(Clone, Copy)]
enum Root {
    Sqrt,
    InvSqrt,
}

fn principal_root(a: &CMat, which: Root, cfg: &MatfunConfig) -> Result<CMat> {
    check_square(a)?;
    let info = spectrum_info(a, cfg)?;
    check_right_half_plane(&info, cfg)?;
    if info.hermitian {
        Ok(match which {
            Root::Sqrt => hermitian_function(a, f64::sqrt),
            Root::InvSqrt => hermitian_function(a, |x| 1.0 / x.sqrt()),
        })
    } else {
        let (s, i) = denman_beavers(a, cfg)?;
        Ok(match which {
            Root::Sqrt => s,
            Root::InvSqrt => i,
        })
    }
}

/// Principal square root.
pub fn matrix_sqrt(a: &CMat, cfg: &MatfunConfig) -> Result<CMat> {
    let r = principal_root(a, Root::Sqrt, cfg)?;
    let scale = spectral_norm(a);
    let defect = spectral_norm(&(&r * &r - a));
    if defect > cfg.sqrt_tol * scale {
        return Err(MatfunError::Postcondition {
            what: "sqrt residual",
            value: defect / scale,
            tol: cfg.sqrt_tol,
        });
    }
    Ok(r)
}

/// Principal inverse square root.
pub fn matrix_inv_sqrt(a: &CMat, cfg: &MatfunConfig) -> Result<CMat> {
    let r = principal_root(a, Root::InvSqrt, cfg)?;
    let defect = spectral_norm(&(&r * &r * a - identity(a.nrows())));
    if defect > cfg.sqrt_tol {
        return Err(MatfunError::Postcondition {
            what: "inverse sqrt residual",
            value: defect,
            tol: cfg.sqrt_tol,
        });
    }
    Ok(r)
}

/// Eigenpairs of a β-pseudo-Hermitian `H` from the Hermitian pencil
/// `(βH) x = E β x`, which requires `βH` positive definite.
#[derive(Debug, Clone)]
pub struct PencilEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Columns normalized to `|x†βx| = 1`.
    pub vectors: CMat,
}

pub fn pseudo_hermitian_eigen(h: &CMat, beta: &CMat) -> Result<PencilEigen> {
    let n = check_square(h)?;
    let g = hermitian_part(&beta_left(beta, h));
    let chol = Cholesky::new(g).ok_or(MatfunError::IndefiniteMetric)?;
    let l_inv = chol
        .l()
        .solve_lower_triangular(&identity(n))
        .ok_or(MatfunError::EigenFailure)?;
    let c = beta_right(&l_inv, beta) * l_inv.adjoint();
    let (mu, w) = hermitian_eigen(&c);
    let mut pairs: Vec<(f64, usize)> = mu.iter().enumerate().map(|(i, &m)| (1.0 / m, i)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let back = l_inv.adjoint();
    let mut vectors = CMat::zeros(n, n);
    for (col, &(_, i)) in pairs.iter().enumerate() {
        let x = &back * w.column(i) * Complex64::new(1.0 / mu[i].abs().sqrt(), 0.0);
        vectors.set_column(col, &x);
    }
    Ok(PencilEigen {
        values: pairs.iter().map(|p| p.0).collect(),
        vectors,
    })
}
