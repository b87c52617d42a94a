//! Concrete Hamiltonians: a periodic lattice Dirac particle and the spin-1
//! Sakata-Taketani particle in a uniform magnetic field.

mod lattice;
mod spin1;

pub use lattice::{
    build_lattice_dirac, LatticeDirac, LatticeDiracFamily, LatticeDiracSpec, PotentialShape,
    SMOOTHNESS_BOUND,
};
pub use spin1::{
    build_spin1_landau, degeneracy_key, landau_energy, polarization, spin1_analytic_spectrum,
    spin1_numeric_spectrum, DegeneracyGroup, ExpectationRow, LevelRow, SpectrumReport, Spin1Landau,
    Spin1LandauSpec, UpperBlockOperators, EDGE_GUARD,
};

use crate::matfun::MatfunError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("potential is not smooth: max second difference {second:e} exceeds {bound} x max |V| = {limit:e}")]
    RoughPotential { second: f64, bound: f64, limit: f64 },
    #[error("comparison needs Landau level {needed} but n_max = {n_max}")]
    TruncationTooSmall { needed: usize, n_max: usize },
    #[error("metric anomaly: {0}")]
    MetricAnomaly(String),
    #[error(transparent)]
    Matfun(#[from] MatfunError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

impl From<ModelError> for MatfunError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Matfun(inner) => inner,
            other => MatfunError::Model(other.to_string()),
        }
    }
}
