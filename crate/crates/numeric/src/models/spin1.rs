use serde::{Deserialize, Serialize};

use super::{ModelError, Result};
use crate::matfun::{
    eriksen_transform_numeric, pseudo_hermitian_eigen, BlockOperator, FwParts, HermClass,
    MatfunConfig, MatfunError,
};
use crate::{CMat, CVec, Complex64};

/// Landau levels within this distance of `n_max` are never compared.
pub const EDGE_GUARD: usize = 3;

/// Spin-1 particle with `P_z = 0` in the field `B e_z`, `c = 1`, ħ explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spin1LandauSpec {
    pub mass: f64,
    /// Signed charge.
    pub charge: f64,
    pub g_factor: f64,
    /// Signed `B_z`.
    pub field: f64,
    pub hbar: f64,
    pub n_max: usize,
}

impl Spin1LandauSpec {
    /// Signed `eħB`.
    pub fn coupling(&self) -> f64 {
        self.charge * self.hbar * self.field
    }

    /// `|e|ħ|B|`.
    pub fn landau_unit(&self) -> f64 {
        self.coupling().abs()
    }

    /// `sgn(eB)`.
    pub fn orientation(&self) -> f64 {
        self.coupling().signum()
    }

    pub fn is_weak_coupling(&self) -> bool {
        self.landau_unit() / (self.mass * self.mass) < 1.0
    }

    /// `ħ/S₀` with `S₀ = ε²/(|e|B)`.
    pub fn hbar_over_action(&self, energy: f64) -> f64 {
        self.landau_unit() / (energy * energy)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(ModelError::InvalidSpec(m.to_string()));
        for (name, v) in [("mass", self.mass), ("hbar", self.hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} must be positive and finite"));
            }
        }
        if !(self.charge.is_finite() && self.field.is_finite() && self.g_factor.is_finite()) {
            return bad("charge, field and g_factor must be finite");
        }
        if self.coupling() == 0.0 {
            return bad("eħB must be nonzero to build Landau levels");
        }
        if self.n_max < EDGE_GUARD + 1 {
            return bad("n_max too small");
        }
        Ok(())
    }

    /// Basis index of `|ρ⟩⊗|n⟩⊗|s⟩`, `r ∈ {0, 1}` upper/lower, `s = 0, 1, 2`
    /// for `s_z = +1, 0, −1`.
    pub fn index(&self, r: usize, n: usize, s: usize) -> usize {
        r * 3 * (self.n_max + 1) + 3 * n + s
    }

    pub fn block_dim(&self) -> usize {
        3 * (self.n_max + 1)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ci(im: f64) -> Complex64 {
    Complex64::new(0.0, im)
}

/// `(S_x, S_y, S_z)` in the basis `s_z = +1, 0, −1`.
fn spin_matrices() -> (CMat, CMat, CMat) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sx = CMat::from_row_slice(
        3,
        3,
        &[
            c(0.0),
            c(r),
            c(0.0),
            c(r),
            c(0.0),
            c(r),
            c(0.0),
            c(r),
            c(0.0),
        ],
    );
    let sy = CMat::from_row_slice(
        3,
        3,
        &[
            c(0.0),
            ci(-r),
            c(0.0),
            ci(r),
            c(0.0),
            ci(-r),
            c(0.0),
            ci(r),
            c(0.0),
        ],
    );
    let sz = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0), c(0.0), c(-1.0)]));
    (sx, sy, sz)
}

fn truncate(a: &CMat, dim: usize) -> CMat {
    a.view((0, 0), (dim, dim)).into_owned()
}

fn rho(which: u8) -> CMat {
    match which {
        1 => CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        // iρ₂
        2 => CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(-1.0), c(0.0)]),
        _ => CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    }
}

/// Spin operators on the upper (FW) block `|n⟩⊗|s⟩`.
#[derive(Debug, Clone)]
pub struct UpperBlockOperators {
    pub s_z: CMat,
    /// `½{1/|π|, π·S}`.
    pub s_pi: CMat,
    /// `½{1/|π|, (π×B)·S/|B|}`.
    pub s_pixb: CMat,
}

/// The built spin-1 Hamiltonian and the operators needed to analyse it.
#[derive(Debug, Clone)]
pub struct Spin1Landau {
    pub spec: Spin1LandauSpec,
    pub operator: BlockOperator,
    pub parts: FwParts,
    /// `π_x`, `π_y` on the retained Landau levels (edge rows inexact).
    pub pi_x: CMat,
    pub pi_y: CMat,
    /// `π²`, exact on the retained levels.
    pub pi_sq: CMat,
    /// `(π·S)²` on the retained block, exact.
    pub pi_dot_s_sq: CMat,
    pub upper: UpperBlockOperators,
}

/// Builds `H = ρ₃𝔐 + E + O` with
/// `𝔐 = m + π²/2m − (eħ/m) B S_z`,
/// `E = −ρ₃ (eħ(g−2)/2m) B S_z`,
/// `O = iρ₂ [π²/2m − (π·S)²/m + (eħ(g−2)/2m) B S_z]`.
///
/// Ladder operators act on `n_max + 3` levels; products are formed there and
/// truncated, so every retained matrix element of a quadratic is exact.
pub fn build_spin1_landau(spec: &Spin1LandauSpec, cfg: &MatfunConfig) -> Result<Spin1Landau> {
    spec.validate()?;
    let levels = spec.n_max + 1;
    let big = levels + 2;
    let mut a = CMat::zeros(big, big);
    for n in 1..big {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    let ad = a.adjoint();
    let scale = (spec.landau_unit() / 2.0).sqrt();
    let pi_x_big = (&a + &ad) * c(scale);
    let pi_y_big = (&ad - &a) * ci(spec.orientation() * scale);

    let (sx, sy, sz) = spin_matrices();
    let one3 = CMat::identity(3, 3);
    let pi_dot_s_big = pi_x_big.kronecker(&sx) + pi_y_big.kronecker(&sy);
    let dim = 3 * levels;
    let pi_dot_s_sq = truncate(&(&pi_dot_s_big * &pi_dot_s_big), dim);
    let pi_sq_orb = truncate(&(&pi_x_big * &pi_x_big + &pi_y_big * &pi_y_big), levels);
    let pi_sq = pi_sq_orb.kronecker(&one3);
    let s_z = CMat::identity(levels, levels).kronecker(&sz);

    let (m, eb, g) = (spec.mass, spec.coupling(), spec.g_factor);
    let id = CMat::identity(dim, dim);
    let mass_op = &id * c(m) + &pi_sq * c(1.0 / (2.0 * m)) - &s_z * c(eb / m);
    let anomalous = &s_z * c(eb * (g - 2.0) / (2.0 * m));
    let odd_inner = &pi_sq * c(1.0 / (2.0 * m)) - &pi_dot_s_sq * c(1.0 / m) + &anomalous;

    let parts = FwParts {
        m: CMat::identity(2, 2).kronecker(&mass_op),
        e: rho(3).kronecker(&(-&anomalous)),
        o: rho(2).kronecker(&odd_inner),
    };
    let beta = rho(3).kronecker(&id);
    let h = parts.assemble(&beta);
    let operator = BlockOperator::new(h, beta, HermClass::BetaPseudoHermitian, cfg)?;

    let pi_x = truncate(&pi_x_big, levels);
    let pi_y = truncate(&pi_y_big, levels);
    let pi_dot_s = truncate(&pi_dot_s_big, dim);
    let pi_cross_b = truncate(&(pi_y_big.kronecker(&sx) - pi_x_big.kronecker(&sy)), dim)
        * c(spec.field.signum());
    let inv_abs_pi = CMat::from_diagonal(&CVec::from_iterator(
        dim,
        (0..dim).map(|k| c(1.0 / pi_sq[(k, k)].re.sqrt())),
    ));
    let half_anti = |x: &CMat| (&inv_abs_pi * x + x * &inv_abs_pi) * c(0.5);
    let upper = UpperBlockOperators {
        s_z,
        s_pi: half_anti(&pi_dot_s),
        s_pixb: half_anti(&pi_cross_b),
    };

    Ok(Spin1Landau {
        spec: spec.clone(),
        operator,
        parts,
        pi_x,
        pi_y,
        pi_sq,
        pi_dot_s_sq,
        upper,
    })
}

/// `ℋ₀ = sqrt(m² + (2n+1)|e|ħB − 2λ eħB)`.
pub fn landau_energy(spec: &Spin1LandauSpec, n: usize, lambda: i32) -> f64 {
    let m = spec.mass;
    (m * m + (2 * n + 1) as f64 * spec.landau_unit() - 2.0 * lambda as f64 * spec.coupling()).sqrt()
}

/// States sharing this key share `ℋ₀`: `2n + 1 − 2λ sgn(eB)`.
pub fn degeneracy_key(spec: &Spin1LandauSpec, n: usize, lambda: i32) -> i64 {
    (2 * n + 1) as i64 - 2 * lambda as i64 * spec.orientation() as i64
}

/// `(ω₀, 𝔅)` for a level with `ε′ = eps_prime`.
fn anomalous_terms(spec: &Spin1LandauSpec, eps_prime: f64) -> (f64, f64) {
    let (m, eb, g) = (spec.mass, spec.coupling(), spec.g_factor);
    let omega0 = -eb * (g - 2.0) / (2.0 * m);
    let mix = eb * (g - 1.0) * (eps_prime - m) / (4.0 * m * m * eps_prime);
    (omega0, mix)
}

/// Energy of level `(n, λ)`: `ℋ₀` for `λ = 0`, otherwise
/// `ℋ₀ ± ω₀ sqrt(1 + 𝔅²) − (eħB)² g(g−2)/(8m²ε′)` with `ε′ = ℋ₀`.
/// In the limit `B → 0` every level tends to `m`.
pub fn spin1_analytic_spectrum(spec: &Spin1LandauSpec, n: usize, lambda: i32) -> f64 {
    let h0 = landau_energy(spec, n, lambda);
    if lambda == 0 {
        return h0;
    }
    let (m, eb, g) = (spec.mass, spec.coupling(), spec.g_factor);
    let (omega0, mix) = anomalous_terms(spec, h0);
    h0 + lambda as f64 * omega0 * (1.0 + mix * mix).sqrt()
        - eb * eb * g * (g - 2.0) / (8.0 * m * m * h0)
}

/// `⟨S_z⟩ = λ Y` with `Y = 1/sqrt(1 + 𝔅²)`, for a given `ε′`.
pub fn polarization(spec: &Spin1LandauSpec, lambda: i32, eps_prime: f64) -> f64 {
    if lambda == 0 {
        return 0.0;
    }
    let (_, mix) = anomalous_terms(spec, eps_prime);
    lambda as f64 / (1.0 + mix * mix).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub index: usize,
    pub n: usize,
    pub lambda: i32,
    pub group: i64,
    pub energy: f64,
    pub analytic_energy: f64,
    /// `|E − E_analytic| / E_analytic`.
    pub residual: f64,
    /// `"landau"` for `g = 2`, `"anomalous"` otherwise.
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyGroup {
    pub key: i64,
    pub members: Vec<usize>,
    /// `(max E − min E) / mean E` over the numeric members.
    pub spread: f64,
    /// All three `(n, λ)` states of the group are present.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationRow {
    pub index: usize,
    pub n: usize,
    pub lambda: i32,
    pub s_z: f64,
    pub s_pi: f64,
    pub s_pixb: f64,
    pub s_z_sq: f64,
    pub s_pi_sq: f64,
    pub s_pixb_sq: f64,
    /// `λY` with `ε′ = ℋ₀` of the level.
    pub s_z_formula: f64,
    /// `λY` with `ε′ = sqrt(m² + π²_n)`.
    pub s_z_formula_alt: f64,
    /// `⟨ψ|β S_z|ψ⟩ / ⟨ψ|β|ψ⟩` in the original representation.
    pub s_z_beta_metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub spec: Spin1LandauSpec,
    pub levels: Vec<LevelRow>,
    pub groups: Vec<DegeneracyGroup>,
    pub expectations: Vec<ExpectationRow>,
    pub max_relative_residual: f64,
    /// Largest `|⟨S_π⟩|`, `|⟨S_{π×B}⟩|` over the reported states.
    pub max_zero_mean: f64,
    /// Largest `|⟨S_z⟩ − λY|`.
    pub max_polarization_error: f64,
    /// Largest relative spread within complete degeneracy groups.
    pub max_group_spread: f64,
    pub odd_residual: f64,
    /// `ħ/S₀` at the highest reported level.
    pub hbar_over_action: f64,
}

fn expectation(psi: &CVec, op: &CMat) -> f64 {
    (psi.adjoint() * op * psi)[(0, 0)].re
}

/// Diagonalize the spin-1 Hamiltonian, match the lowest `levels` positive
/// energies to analytic `(n, λ)` rows and tabulate spin expectation values in
/// the FW representation.
pub fn spin1_numeric_spectrum(
    spec: &Spin1LandauSpec,
    levels: usize,
    cfg: &MatfunConfig,
) -> Result<SpectrumReport> {
    spec.validate()?;
    let reportable = spec.n_max - EDGE_GUARD;
    let mut rows: Vec<(i64, f64, usize, i32)> = (0..=reportable)
        .flat_map(|n| {
            [1, 0, -1].map(|l| {
                (
                    degeneracy_key(spec, n, l),
                    spin1_analytic_spectrum(spec, n, l),
                    n,
                    l,
                )
            })
        })
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    rows.truncate(levels);
    if let Some(&(key, ..)) = rows.last() {
        // every member of the last group must lie below the guard
        let needed = ((key + 1) / 2).max(0) as usize + 1;
        let largest = rows.iter().map(|r| r.2).max().unwrap_or(0);
        if needed > reportable || 3 * largest > spec.n_max {
            return Err(ModelError::TruncationTooSmall {
                needed: needed.max(3 * largest),
                n_max: spec.n_max,
            });
        }
    }

    let model = build_spin1_landau(spec, cfg)?;
    let beta = model.operator.beta();
    let eig = pseudo_hermitian_eigen(model.operator.matrix(), beta).map_err(|e| match e {
        MatfunError::IndefiniteMetric => {
            ModelError::MetricAnomaly("βH is not positive definite".into())
        }
        other => other.into(),
    })?;
    let first_positive = eig
        .values
        .iter()
        .position(|&e| e > 0.0)
        .unwrap_or(eig.values.len());
    let count = rows.len();
    if first_positive + count > eig.values.len() {
        return Err(ModelError::TruncationTooSmall {
            needed: count,
            n_max: spec.n_max,
        });
    }
    let fw = eriksen_transform_numeric(&model.operator, cfg)?;
    let half = spec.block_dim();
    let beta_sz = beta * CMat::identity(2, 2).kronecker(&model.upper.s_z);

    let formula = if spec.g_factor == 2.0 {
        "landau"
    } else {
        "anomalous"
    };
    let mut levels_out = Vec::with_capacity(count);
    let mut expectations = Vec::with_capacity(count);
    for (i, &(key, analytic, n, lambda)) in rows.iter().enumerate() {
        let col = first_positive + i;
        let energy = eig.values[col];
        let x = eig.vectors.column(col).into_owned();
        let metric = (x.adjoint() * beta * &x)[(0, 0)].re;
        if metric <= 0.0 {
            return Err(ModelError::MetricAnomaly(format!(
                "level {i} has β-norm {metric:e}"
            )));
        }
        levels_out.push(LevelRow {
            index: i,
            n,
            lambda,
            group: key,
            energy,
            analytic_energy: analytic,
            residual: (energy - analytic).abs() / analytic.abs(),
            formula: formula.to_string(),
        });

        let psi = &fw.u * &x;
        let up = psi.rows(0, half).into_owned();
        let up = &up / c(up.norm());
        let ops = &model.upper;
        let eps_alt = (spec.mass * spec.mass + model.pi_sq[(3 * n, 3 * n)].re).sqrt();
        expectations.push(ExpectationRow {
            index: i,
            n,
            lambda,
            s_z: expectation(&up, &ops.s_z),
            s_pi: expectation(&up, &ops.s_pi),
            s_pixb: expectation(&up, &ops.s_pixb),
            s_z_sq: expectation(&up, &(&ops.s_z * &ops.s_z)),
            s_pi_sq: expectation(&up, &(&ops.s_pi * &ops.s_pi)),
            s_pixb_sq: expectation(&up, &(&ops.s_pixb * &ops.s_pixb)),
            s_z_formula: polarization(spec, lambda, landau_energy(spec, n, lambda)),
            s_z_formula_alt: polarization(spec, lambda, eps_alt),
            s_z_beta_metric: expectation(&x, &beta_sz) / metric,
        });
    }

    let mut groups: Vec<DegeneracyGroup> = Vec::new();
    for row in &levels_out {
        match groups.iter_mut().find(|g| g.key == row.group) {
            Some(g) => g.members.push(row.index),
            None => groups.push(DegeneracyGroup {
                key: row.group,
                members: vec![row.index],
                spread: 0.0,
                complete: false,
            }),
        }
    }
    for g in &mut groups {
        let energies: Vec<f64> = g.members.iter().map(|&i| levels_out[i].energy).collect();
        let max = energies.iter().copied().fold(f64::MIN, f64::max);
        let min = energies.iter().copied().fold(f64::MAX, f64::min);
        let mean = energies.iter().sum::<f64>() / energies.len() as f64;
        g.spread = (max - min) / mean;
        g.complete = g.members.len() == 3;
    }

    let max_relative_residual = levels_out.iter().map(|r| r.residual).fold(0.0, f64::max);
    let max_zero_mean = expectations
        .iter()
        .map(|e| e.s_pi.abs().max(e.s_pixb.abs()))
        .fold(0.0, f64::max);
    let max_polarization_error = expectations
        .iter()
        .map(|e| (e.s_z - e.s_z_formula).abs())
        .fold(0.0, f64::max);
    let max_group_spread = groups
        .iter()
        .filter(|g| g.complete)
        .map(|g| g.spread)
        .fold(0.0, f64::max);
    let top = levels_out.last().map(|r| r.energy).unwrap_or(spec.mass);

    Ok(SpectrumReport {
        spec: spec.clone(),
        levels: levels_out,
        groups,
        expectations,
        max_relative_residual,
        max_zero_mean,
        max_polarization_error,
        max_group_spread,
        odd_residual: fw.odd_residual_norm / fw.h_norm,
        hbar_over_action: spec.hbar_over_action(top),
    })
}
