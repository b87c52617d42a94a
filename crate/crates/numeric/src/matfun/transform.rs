use nalgebra::linalg::Schur;

use super::block::{
    anticommutator, beta_conjugate, beta_left, beta_right, commutator, odd_part, BlockOperator,
    HermClass,
};
use super::func::{
    hermitian_eigen, matrix_inv_sqrt, matrix_sqrt, pseudo_hermitian_eigen, spectrum_info,
};
use super::{identity, norm::spectral_norm, MatfunConfig, MatfunError, Result};
use crate::{CMat, Complex64};

/// Output of the numerical Eriksen transform.
#[derive(Debug, Clone)]
pub struct FwNumericResult {
    pub u: CMat,
    pub u_inv: CMat,
    /// Sign operator `H (H²)^(-1/2)`.
    pub lambda: CMat,
    pub h_fw: CMat,
    pub h_norm: f64,
    /// `‖(h_fw − β h_fw β)/2‖`.
    pub odd_residual_norm: f64,
    /// Largest eigenvalue displacement relative to the largest `|eigenvalue|`.
    pub spectrum_drift: f64,
    /// `‖U†U − 1‖` (Hermitian class) or `‖U βU†β − 1‖` (pseudo class).
    pub unitarity_defect: f64,
    /// Eriksen condition defect `‖βU − U†β‖`; only meaningful for the
    /// Hermitian class.
    pub eriksen_defect: f64,
    /// `min |eig(H²)| / ‖H‖²`.
    pub spectral_gap: f64,
    /// Upper β-block has only positive and lower only negative eigenvalues.
    pub blocks_separated: bool,
}

fn beta_block_bases(beta: &CMat) -> (CMat, CMat) {
    let (values, vectors) = hermitian_eigen(beta);
    let lower: Vec<usize> = (0..values.len()).filter(|&i| values[i] < 0.0).collect();
    let upper: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 0.0).collect();
    let pick = |idx: &[usize]| CMat::from_fn(beta.nrows(), idx.len(), |r, c| vectors[(r, idx[c])]);
    (pick(&upper), pick(&lower))
}

fn sorted_spectrum(h: &BlockOperator) -> Result<Vec<f64>> {
    match h.herm_class() {
        HermClass::Hermitian => Ok(hermitian_eigen(h.matrix()).0),
        HermClass::BetaPseudoHermitian => match pseudo_hermitian_eigen(h.matrix(), h.beta()) {
            Ok(e) => Ok(e.values),
            Err(MatfunError::IndefiniteMetric) => {
                let schur = Schur::try_new(h.matrix().clone(), f64::EPSILON, 10_000)
                    .ok_or(MatfunError::EigenFailure)?;
                let ev = schur.eigenvalues().ok_or(MatfunError::EigenFailure)?;
                let mut values: Vec<f64> = ev.iter().map(|z| z.re).collect();
                values.sort_by(f64::total_cmp);
                Ok(values)
            }
            Err(e) => Err(e),
        },
    }
}

/// Exact FW transform `U = (1 + βλ)(2 + βλ + λβ)^(-1/2)` with `U⁻¹ = βUβ`.
pub fn eriksen_transform_numeric(h: &BlockOperator, cfg: &MatfunConfig) -> Result<FwNumericResult> {
    let n = h.dim();
    let (hm, beta) = (h.matrix(), h.beta());
    let one = identity(n);
    let h_norm = spectral_norm(hm);

    let h2 = hm * hm;
    let info = spectrum_info(&h2, cfg)?;
    let spectral_gap = if h_norm > 0.0 {
        info.min_abs / (h_norm * h_norm)
    } else {
        0.0
    };
    if spectral_gap < cfg.gap_min {
        return Err(MatfunError::SpectralGapTooSmall {
            gap: spectral_gap,
            min: cfg.gap_min,
        });
    }
    let lambda = hm * matrix_inv_sqrt(&h2, cfg)?;
    let beta_lambda = beta_left(beta, &lambda);
    let d = &one * Complex64::new(2.0, 0.0) + &beta_lambda + beta_right(&lambda, beta);
    let u = (&one + &beta_lambda) * matrix_inv_sqrt(&d, cfg)?;
    let u_inv = beta_conjugate(&u, beta);
    let h_fw = &u * hm * &u_inv;

    let u_dag = u.adjoint();
    let eriksen_defect = spectral_norm(&(beta_left(beta, &u) - beta_right(&u_dag, beta)));
    let unitarity_defect = match h.herm_class() {
        HermClass::Hermitian => spectral_norm(&(&u_dag * &u - &one)),
        HermClass::BetaPseudoHermitian => {
            spectral_norm(&(&u * beta_conjugate(&u_dag, beta) - &one))
        }
    };
    if unitarity_defect > cfg.unitarity_tol
        || (h.herm_class() == HermClass::Hermitian && eriksen_defect > cfg.unitarity_tol)
    {
        return Err(MatfunError::ClassMismatch {
            class: h.herm_class(),
            defect: unitarity_defect.max(eriksen_defect),
        });
    }

    let odd_residual_norm = spectral_norm(&odd_part(&h_fw, beta));
    if odd_residual_norm > cfg.odd_tol * h_norm {
        return Err(MatfunError::Postcondition {
            what: "odd residual",
            value: odd_residual_norm / h_norm,
            tol: cfg.odd_tol,
        });
    }

    let before = sorted_spectrum(h)?;
    let after = hermitian_eigen(&h_fw).0;
    let scale = before
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let spectrum_drift = before
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;
    if spectrum_drift > cfg.drift_tol {
        return Err(MatfunError::Postcondition {
            what: "spectrum drift",
            value: spectrum_drift,
            tol: cfg.drift_tol,
        });
    }

    let (up, low) = beta_block_bases(beta);
    let up_values = hermitian_eigen(&(up.adjoint() * &h_fw * &up)).0;
    let low_values = hermitian_eigen(&(low.adjoint() * &h_fw * &low)).0;
    let blocks_separated =
        up_values.iter().all(|&x| x > 0.0) && low_values.iter().all(|&x| x < 0.0);

    Ok(FwNumericResult {
        u,
        u_inv,
        lambda,
        h_fw,
        h_norm,
        odd_residual_norm,
        spectrum_drift,
        unitarity_defect,
        eriksen_defect,
        spectral_gap,
        blocks_separated,
    })
}

/// `βε + E + ¼{(2ε² + {ε,M})⁻¹, β[O,[O,M]] − [O,[O,E]]}` with
/// `ε = sqrt(M² + O²)`, for the stationary case.
pub fn relfw_hamiltonian_numeric(
    m_op: &CMat,
    e_op: &CMat,
    o_op: &CMat,
    beta: &CMat,
    cfg: &MatfunConfig,
) -> Result<CMat> {
    let eps = matrix_sqrt(&(m_op * m_op + o_op * o_op), cfg)?;
    let kernel = &eps * &eps * Complex64::new(2.0, 0.0) + anticommutator(&eps, m_op);
    let k_norm = spectral_norm(&kernel);
    let k_inv = kernel
        .clone()
        .lu()
        .try_inverse()
        .ok_or(MatfunError::SingularKernel)?;
    let k_inv_norm = spectral_norm(&k_inv);
    if !k_inv_norm.is_finite() || k_norm * k_inv_norm > cfg.cond_cap {
        return Err(MatfunError::SingularKernel);
    }
    let c = beta_left(beta, &commutator(o_op, &commutator(o_op, m_op)))
        - commutator(o_op, &commutator(o_op, e_op));
    let result =
        beta_left(beta, &eps) + e_op + anticommutator(&k_inv, &c) * Complex64::new(0.25, 0.0);

    let odd = spectral_norm(&odd_part(&result, beta));
    let scale = spectral_norm(&result);
    if odd > cfg.even_tol * scale.max(1.0) {
        return Err(MatfunError::Postcondition {
            what: "odd part of closed form",
            value: odd / scale,
            tol: cfg.even_tol,
        });
    }
    Ok(result)
}
