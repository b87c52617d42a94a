use std::path::Path;

use anyhow::{bail, Context};
use fwlab_numeric::matfun::MatfunConfig;
use fwlab_numeric::models::{PotentialShape, Spin1LandauSpec};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Prefix of the environment variables that override tolerance knobs,
/// e.g. `FWLAB_TOL_ODD_TOL=1e-9`.
pub const ENV_PREFIX: &str = "FWLAB_TOL_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct A24Perturbation {
    /// Index into the seven `A24` sub-terms.
    pub index: usize,
    /// Replacement inner coefficient, as a rational string such as `"23"`.
    pub inner: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EriksenSeriesConfig {
    pub weight_max: u32,
    pub perturb_a24: Option<A24Perturbation>,
}

impl Default for EriksenSeriesConfig {
    fn default() -> Self {
        Self {
            weight_max: 8,
            perturb_a24: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelFwCheckConfig {
    pub f_order: usize,
    pub g_order: usize,
}

impl Default for RelFwCheckConfig {
    fn default() -> Self {
        Self {
            f_order: 4,
            g_order: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub sites: usize,
    pub box_length: f64,
    pub mass: f64,
    pub potential: PotentialShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericFwConfig {
    pub lattice: LatticeConfig,
    pub hbar: Vec<f64>,
    pub min_slope: f64,
    pub min_r_squared: f64,
    /// Random Hermitian instances checked for unitarity of the transform.
    pub random_checks: usize,
    pub seed: u64,
    /// Write the transformed Hamiltonian at the first ħ as JSON.
    pub export_matrices: bool,
    pub tolerances: MatfunConfig,
}

impl Default for NumericFwConfig {
    fn default() -> Self {
        Self {
            lattice: LatticeConfig {
                sites: 64,
                box_length: 64.0,
                mass: 1.0,
                potential: PotentialShape::Cosine {
                    amplitude: 0.3,
                    periods: 1,
                },
            },
            hbar: vec![0.2, 0.1, 0.05, 0.025],
            min_slope: 1.9,
            min_r_squared: 0.98,
            random_checks: 32,
            seed: 0,
            export_matrices: false,
            tolerances: MatfunConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Spin1SpectrumConfig {
    pub spec: Spin1LandauSpec,
    pub levels: usize,
    /// Bound on the relative level residual; defaults to `1e-8` for `g = 2`
    /// and to `max(1e-8, (|e|ħB)³/m⁵)` otherwise.
    pub max_residual: Option<f64>,
    pub max_polarization_error: f64,
    pub max_zero_mean: f64,
    /// Number of successive field halvings for the residual-scaling fit.
    pub field_halvings: usize,
    pub min_field_exponent: f64,
    pub tolerances: MatfunConfig,
}

impl Default for Spin1SpectrumConfig {
    fn default() -> Self {
        Self {
            spec: Spin1LandauSpec {
                mass: 1.0,
                charge: 1.0,
                g_factor: 2.0,
                field: 0.02,
                hbar: 1.0,
                n_max: 60,
            },
            levels: 10,
            max_residual: None,
            max_polarization_error: 1e-6,
            max_zero_mean: 1e-8,
            field_halvings: 0,
            min_field_exponent: 2.7,
            tolerances: MatfunConfig::default(),
        }
    }
}

impl Spin1SpectrumConfig {
    pub fn residual_bound(&self) -> f64 {
        self.max_residual.unwrap_or_else(|| {
            let s = &self.spec;
            if s.g_factor == 2.0 {
                1e-8
            } else {
                (s.landau_unit().powi(3) / s.mass.powi(5)).max(1e-8)
            }
        })
    }
}

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> anyhow::Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

/// Apply `FWLAB_TOL_<FIELD>` overrides from `vars`.
pub fn apply_env_overrides(
    cfg: &MatfunConfig,
    vars: impl IntoIterator<Item = (String, String)>,
) -> anyhow::Result<MatfunConfig> {
    let mut value = serde_json::to_value(cfg)?;
    let map = value
        .as_object_mut()
        .expect("config serializes to an object");
    for (key, raw) in vars {
        let Some(field) = key.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let field = field.to_ascii_lowercase();
        let Some(slot) = map.get_mut(&field) else {
            bail!("{key} does not name a tolerance knob");
        };
        *slot = if slot.is_u64() {
            raw.parse::<u64>()
                .with_context(|| format!("{key}={raw} is not an integer"))?
                .into()
        } else {
            raw.parse::<f64>()
                .with_context(|| format!("{key}={raw} is not a number"))?
                .into()
        };
    }
    Ok(serde_json::from_value(value)?)
}

/// SHA-256 of the canonical JSON form of the effective configuration.
pub fn config_hash<T: Serialize>(cfg: &T) -> anyhow::Result<String> {
    let bytes = serde_json::to_vec(cfg)?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_override_changes_only_named_knob() {
        let base = MatfunConfig::default();
        let vars = vec![
            ("FWLAB_TOL_ODD_TOL".to_string(), "1e-8".to_string()),
            ("PATH".into(), "/bin".into()),
        ];
        let cfg = apply_env_overrides(&base, vars).unwrap();
        assert_eq!(cfg.odd_tol, 1e-8);
        assert_eq!(
            MatfunConfig {
                odd_tol: base.odd_tol,
                ..cfg
            },
            base
        );
    }

    #[test]
    fn env_override_rejects_unknown_knob() {
        let vars = vec![("FWLAB_TOL_MASS".to_string(), "2".to_string())];
        assert!(apply_env_overrides(&MatfunConfig::default(), vars).is_err());
    }

    #[test]
    fn integer_knobs_parse_as_integers() {
        let vars = vec![("FWLAB_TOL_DB_MAX_ITER".to_string(), "40".to_string())];
        let cfg = apply_env_overrides(&MatfunConfig::default(), vars).unwrap();
        assert_eq!(cfg.db_max_iter, 40);
        let bad = vec![("FWLAB_TOL_DB_MAX_ITER".to_string(), "4.5".to_string())];
        assert!(apply_env_overrides(&MatfunConfig::default(), bad).is_err());
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(
            serde_json::from_str::<EriksenSeriesConfig>(r#"{"weight_max": 4, "colour": 1}"#)
                .is_err()
        );
        assert!(
            serde_json::from_str::<NumericFwConfig>(r#"{"tolerances": {"odd_toll": 1}}"#).is_err()
        );
    }

    #[test]
    fn hash_is_stable() {
        let a = config_hash(&RelFwCheckConfig::default()).unwrap();
        assert_eq!(a, config_hash(&RelFwCheckConfig::default()).unwrap());
        assert_ne!(
            a,
            config_hash(&RelFwCheckConfig {
                f_order: 3,
                g_order: 2
            })
            .unwrap()
        );
        assert_eq!(a.len(), 64);
    }
}
