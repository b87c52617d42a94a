use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::block::{even_part, BlockOperator, FwParts};
use super::transform::{eriksen_transform_numeric, relfw_hamiltonian_numeric};
use super::{norm::spectral_norm, MatfunConfig, MatfunError, Result};

/// Differences at or below this level count as exact agreement.
pub const EXACT_AGREEMENT: f64 = 1e-12;
/// Smallest accepted ratio between the largest and smallest ħ of a sweep.
pub const MIN_SWEEP_RATIO: f64 = 8.0;

/// One member of an ħ-parametrized model family.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    pub operator: BlockOperator,
    pub parts: FwParts,
    pub mass: f64,
    /// Characteristic length of the external field.
    pub length_scale: f64,
}

pub trait ModelFamily: Sync {
    fn name(&self) -> String;
    fn instance(&self, hbar: f64) -> Result<ModelInstance>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub model: String,
    pub hbar: Vec<f64>,
    /// `‖even(H_FW^Eriksen) − H_FW^rel‖ / ‖H‖` per ħ.
    pub diff: Vec<f64>,
    /// Fitted exponent of `diff ∝ ħ^slope`; absent on exact agreement.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    /// `ħ / (m l)` per ħ, with `l` the field's characteristic length.
    pub debroglie_ratio: Vec<f64>,
    pub odd_residual: Vec<f64>,
    /// `diff` decreases with ħ.
    pub monotone: bool,
    pub exact_agreement: bool,
}

fn validate_sweep(hbar: &[f64]) -> Result<()> {
    if hbar.len() < 4 {
        return Err(MatfunError::InvalidSweep(format!(
            "need at least 4 values, got {}",
            hbar.len()
        )));
    }
    if hbar.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(MatfunError::InvalidSweep(
            "values must be positive and finite".into(),
        ));
    }
    let max = hbar.iter().copied().fold(0.0, f64::max);
    let min = hbar.iter().copied().fold(f64::INFINITY, f64::min);
    if max / min < MIN_SWEEP_RATIO {
        return Err(MatfunError::InvalidSweep(format!(
            "span {:.3} below {MIN_SWEEP_RATIO}",
            max / min
        )));
    }
    Ok(())
}

struct Point {
    diff: f64,
    ratio: f64,
    odd: f64,
}

fn evaluate(family: &dyn ModelFamily, hbar: f64, cfg: &MatfunConfig) -> Result<Point> {
    let inst = family.instance(hbar)?;
    let beta = inst.operator.beta();
    let fw = eriksen_transform_numeric(&inst.operator, cfg)?;
    let rel = relfw_hamiltonian_numeric(&inst.parts.m, &inst.parts.e, &inst.parts.o, beta, cfg)?;
    let diff = spectral_norm(&(even_part(&fw.h_fw, beta) - rel)) / fw.h_norm;
    Ok(Point {
        diff,
        ratio: hbar / (inst.mass * inst.length_scale),
        odd: fw.odd_residual_norm / fw.h_norm,
    })
}

/// Compare the exact and closed-form FW Hamiltonians across ħ and fit the
/// order of their difference. Points are evaluated in parallel and reported
/// in input order.
pub fn hbar_convergence_study(
    family: &dyn ModelFamily,
    hbar: &[f64],
    cfg: &MatfunConfig,
) -> Result<SlopeReport> {
    validate_sweep(hbar)?;
    let points: Vec<Point> = hbar
        .par_iter()
        .map(|&h| evaluate(family, h, cfg))
        .collect::<Result<_>>()?;

    let diff: Vec<f64> = points.iter().map(|p| p.diff).collect();
    let exact_agreement = diff.iter().all(|&d| d <= EXACT_AGREEMENT);

    let mut order: Vec<usize> = (0..hbar.len()).collect();
    order.sort_by(|&a, &b| hbar[a].total_cmp(&hbar[b]));
    let monotone = order.windows(2).all(|w| diff[w[0]] < diff[w[1]]);

    let fit = if exact_agreement {
        None
    } else {
        let pairs: Vec<(f64, f64)> = hbar
            .iter()
            .zip(&diff)
            .filter(|(_, &d)| d > 0.0)
            .map(|(&h, &d)| (h.ln(), d.ln()))
            .collect();
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        least_squares(&x, &y)
    };

    Ok(SlopeReport {
        model: family.name(),
        hbar: hbar.to_vec(),
        diff,
        slope: fit.map(|f| f.slope),
        intercept: fit.map(|f| f.intercept),
        r_squared: fit.map(|f| f.r_squared),
        debroglie_ratio: points.iter().map(|p| p.ratio).collect(),
        odd_residual: points.iter().map(|p| p.odd).collect(),
        monotone: monotone && !exact_agreement,
        exact_agreement,
    })
}
