use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ModelError, Result};
use crate::matfun::{
    self, BlockOperator, FwParts, HermClass, MatfunConfig, ModelFamily, ModelInstance,
};
use crate::{CMat, Complex64};

/// A potential counts as smooth when `max |Δ²V| ≤ SMOOTHNESS_BOUND · max |V|`.
pub const SMOOTHNESS_BOUND: f64 = 0.5;

/// Potential profiles for config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialShape {
    /// `amplitude · cos(2π periods x / L)`.
    Cosine {
        amplitude: f64,
        periods: u32,
    },
    Constant {
        value: f64,
    },
    Samples {
        values: Vec<f64>,
    },
}

impl PotentialShape {
    pub fn samples(&self, sites: usize, box_length: f64) -> Vec<f64> {
        match self {
            PotentialShape::Cosine { amplitude, periods } => (0..sites)
                .map(|j| {
                    let x = j as f64 * box_length / sites as f64;
                    amplitude * (2.0 * PI * *periods as f64 * x / box_length).cos()
                })
                .collect(),
            PotentialShape::Constant { value } => vec![*value; sites],
            PotentialShape::Samples { values } => values.clone(),
        }
    }
}

/// Periodic 1D lattice Dirac particle, `c = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDiracSpec {
    pub sites: usize,
    pub box_length: f64,
    pub mass: f64,
    pub hbar: f64,
    /// `V(x_j)` at `x_j = j L / N`.
    pub potential: Vec<f64>,
}

impl LatticeDiracSpec {
    pub fn new(
        sites: usize,
        box_length: f64,
        mass: f64,
        hbar: f64,
        shape: &PotentialShape,
    ) -> Self {
        Self {
            sites,
            box_length,
            mass,
            hbar,
            potential: shape.samples(sites, box_length),
        }
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.sites as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ModelError::InvalidSpec(m));
        if self.sites < 16 {
            return bad(format!("need at least 16 sites, got {}", self.sites));
        }
        if self.potential.len() != self.sites {
            return bad(format!(
                "{} potential samples for {} sites",
                self.potential.len(),
                self.sites
            ));
        }
        for (name, v) in [
            ("box_length", self.box_length),
            ("mass", self.mass),
            ("hbar", self.hbar),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite"));
            }
        }
        if self.potential.iter().any(|v| !v.is_finite()) {
            return bad("potential samples must be finite".into());
        }
        let (second, vmax) = (self.max_second_difference(), self.max_potential());
        if second > SMOOTHNESS_BOUND * vmax {
            return Err(ModelError::RoughPotential {
                second,
                bound: SMOOTHNESS_BOUND,
                limit: SMOOTHNESS_BOUND * vmax,
            });
        }
        Ok(())
    }

    fn max_potential(&self) -> f64 {
        self.potential.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    fn max_second_difference(&self) -> f64 {
        let n = self.sites;
        let v = &self.potential;
        (0..n)
            .map(|j| (v[(j + 1) % n] - 2.0 * v[j] + v[(j + n - 1) % n]).abs())
            .fold(0.0, f64::max)
    }

    /// `max |V| / max |V'|`, or the box length for a flat potential.
    pub fn length_scale(&self) -> f64 {
        let n = self.sites;
        let dx = self.spacing();
        let slope = (0..n)
            .map(|j| (self.potential[(j + 1) % n] - self.potential[j]).abs() / dx)
            .fold(0.0, f64::max);
        if slope == 0.0 {
            self.box_length
        } else {
            self.max_potential() / slope
        }
    }

    /// Closed-form free spectrum `±sqrt(m² + p_k²)`, `p_k = ħ sin(2πk/N)/dx`,
    /// in ascending order. Only meaningful for `V = 0`.
    pub fn free_spectrum(&self) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.sites)
            .flat_map(|k| {
                let p =
                    self.hbar * (2.0 * PI * k as f64 / self.sites as f64).sin() / self.spacing();
                let e = (self.mass * self.mass + p * p).sqrt();
                [e, -e]
            })
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Built model: the operator `H = σ₃⊗m + 1⊗V + σ₁⊗p` and its parts.
#[derive(Debug, Clone)]
pub struct LatticeDirac {
    pub spec: LatticeDiracSpec,
    pub operator: BlockOperator,
    pub parts: FwParts,
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

fn pauli(which: u8) -> CMat {
    let c = |re: f64| Complex64::new(re, 0.0);
    match which {
        1 => CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        _ => CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    }
}

/// Periodic central-difference momentum `−iħ(ψ_{j+1} − ψ_{j−1})/(2 dx)`.
fn momentum(spec: &LatticeDiracSpec) -> CMat {
    let n = spec.sites;
    let t = Complex64::new(0.0, spec.hbar / (2.0 * spec.spacing()));
    let mut p = CMat::zeros(n, n);
    for j in 0..n {
        p[(j, (j + 1) % n)] -= t;
        p[(j, (j + n - 1) % n)] += t;
    }
    p
}

pub fn build_lattice_dirac(spec: &LatticeDiracSpec, cfg: &MatfunConfig) -> Result<LatticeDirac> {
    spec.validate()?;
    let n = spec.sites;
    let one_n = CMat::identity(n, n);
    let v = CMat::from_diagonal(&crate::CVec::from_iterator(
        n,
        spec.potential.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let parts = FwParts {
        m: CMat::identity(2 * n, 2 * n) * Complex64::new(spec.mass, 0.0),
        e: kron(&CMat::identity(2, 2), &v),
        o: kron(&pauli(1), &momentum(spec)),
    };
    let beta = kron(&pauli(3), &one_n);
    let h = parts.assemble(&beta);
    let operator = BlockOperator::new(h, beta, HermClass::Hermitian, cfg)?;
    Ok(LatticeDirac {
        spec: spec.clone(),
        operator,
        parts,
    })
}

/// The lattice model with a fixed potential, parametrized by ħ.
#[derive(Debug, Clone)]
pub struct LatticeDiracFamily {
    pub template: LatticeDiracSpec,
    pub config: MatfunConfig,
}

impl ModelFamily for LatticeDiracFamily {
    fn name(&self) -> String {
        format!(
            "lattice_dirac(N={}, L={}, m={})",
            self.template.sites, self.template.box_length, self.template.mass
        )
    }

    fn instance(&self, hbar: f64) -> matfun::Result<ModelInstance> {
        let spec = LatticeDiracSpec {
            hbar,
            ..self.template.clone()
        };
        let built = build_lattice_dirac(&spec, &self.config)?;
        Ok(ModelInstance {
            operator: built.operator,
            parts: built.parts,
            mass: spec.mass,
            length_scale: spec.length_scale(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::hermitian_eigen;

    fn spec(shape: PotentialShape, sites: usize, hbar: f64) -> LatticeDiracSpec {
        LatticeDiracSpec::new(sites, 10.0, 1.0, hbar, &shape)
    }

    #[test]
    fn free_spectrum_matches_closed_form() {
        let s = spec(PotentialShape::Constant { value: 0.0 }, 32, 0.3);
        let m = build_lattice_dirac(&s, &MatfunConfig::default()).unwrap();
        let (values, _) = hermitian_eigen(m.operator.matrix());
        for (a, b) in values.iter().zip(s.free_spectrum()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let cfg = MatfunConfig::default();
        let free = build_lattice_dirac(
            &spec(PotentialShape::Constant { value: 0.0 }, 16, 0.5),
            &cfg,
        )
        .unwrap();
        let shifted = build_lattice_dirac(
            &spec(PotentialShape::Constant { value: 0.25 }, 16, 0.5),
            &cfg,
        )
        .unwrap();
        let (a, _) = hermitian_eigen(free.operator.matrix());
        let (b, _) = hermitian_eigen(shifted.operator.matrix());
        for (x, y) in a.iter().zip(&b) {
            assert!((y - x - 0.25).abs() < 1e-13);
        }
    }

    #[test]
    fn rough_potential_is_rejected() {
        let values: Vec<f64> = (0..16)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let s = spec(PotentialShape::Samples { values }, 16, 0.1);
        assert!(matches!(
            s.validate(),
            Err(ModelError::RoughPotential { .. })
        ));
    }

    #[test]
    fn too_few_sites() {
        let s = spec(PotentialShape::Constant { value: 0.0 }, 8, 0.1);
        assert!(matches!(s.validate(), Err(ModelError::InvalidSpec(_))));
    }

    #[test]
    fn cosine_length_scale() {
        let s = spec(
            PotentialShape::Cosine {
                amplitude: 0.3,
                periods: 1,
            },
            256,
            0.1,
        );
        assert!((s.length_scale() - 10.0 / (2.0 * PI)).abs() < 1e-2);
    }

    #[test]
    fn split_recovers_parts() {
        let s = spec(
            PotentialShape::Cosine {
                amplitude: 0.3,
                periods: 1,
            },
            16,
            0.1,
        );
        let m = build_lattice_dirac(&s, &MatfunConfig::default()).unwrap();
        let (even, odd) = m.operator.even_odd_split();
        assert!((odd - &m.parts.o).norm() < 1e-14);
        assert!((even - (m.operator.beta() * &m.parts.m + &m.parts.e)).norm() < 1e-14);
    }
}
