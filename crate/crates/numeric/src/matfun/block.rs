use serde::{Deserialize, Serialize};

use super::{check_square, identity, norm::spectral_norm, MatfunConfig, MatfunError, Result};
use crate::{CMat, Complex64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HermClass {
    /// `H† = H`.
    Hermitian,
    /// `H† = βHβ`, so `βH` is Hermitian.
    BetaPseudoHermitian,
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

fn diagonal_of(beta: &CMat) -> Option<Vec<Complex64>> {
    let n = beta.nrows();
    for c in 0..n {
        for r in 0..n {
            if r != c && beta[(r, c)] != Complex64::new(0.0, 0.0) {
                return None;
            }
        }
    }
    Some((0..n).map(|k| beta[(k, k)]).collect())
}

/// `βA`, with a fast path for diagonal `β`.
pub fn beta_left(beta: &CMat, a: &CMat) -> CMat {
    match diagonal_of(beta) {
        Some(d) => {
            let mut out = a.clone();
            for (r, s) in d.iter().enumerate() {
                out.row_mut(r).iter_mut().for_each(|x| *x *= s);
            }
            out
        }
        None => beta * a,
    }
}

/// `Aβ`, with a fast path for diagonal `β`.
pub fn beta_right(a: &CMat, beta: &CMat) -> CMat {
    match diagonal_of(beta) {
        Some(d) => {
            let mut out = a.clone();
            for (c, s) in d.iter().enumerate() {
                out.column_mut(c).iter_mut().for_each(|x| *x *= s);
            }
            out
        }
        None => a * beta,
    }
}

/// `βAβ`.
pub fn beta_conjugate(a: &CMat, beta: &CMat) -> CMat {
    beta_right(&beta_left(beta, a), beta)
}

/// `(A + βAβ)/2`.
pub fn even_part(a: &CMat, beta: &CMat) -> CMat {
    (a + beta_conjugate(a, beta)) * Complex64::new(0.5, 0.0)
}

/// `(A − βAβ)/2`.
pub fn odd_part(a: &CMat, beta: &CMat) -> CMat {
    (a - beta_conjugate(a, beta)) * Complex64::new(0.5, 0.0)
}

/// A Hamiltonian together with its grading involution `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    matrix: CMat,
    beta: CMat,
    herm_class: HermClass,
}

impl BlockOperator {
    pub fn new(
        matrix: CMat,
        beta: CMat,
        herm_class: HermClass,
        cfg: &MatfunConfig,
    ) -> Result<Self> {
        let n = check_square(&matrix)?;
        let nb = check_square(&beta)?;
        if n != nb {
            return Err(MatfunError::DimensionMismatch(n, nb));
        }
        let involution = spectral_norm(&(&beta * &beta - identity(n)));
        let asym = spectral_norm(&(&beta - beta.adjoint()));
        if involution.max(asym) > cfg.beta_tol {
            return Err(MatfunError::BadBeta(involution.max(asym)));
        }
        let h_norm = spectral_norm(&matrix);
        let defect = match herm_class {
            HermClass::Hermitian => spectral_norm(&(&matrix - matrix.adjoint())),
            HermClass::BetaPseudoHermitian => {
                let g = beta_left(&beta, &matrix);
                spectral_norm(&(&g - g.adjoint()))
            }
        };
        if defect > cfg.herm_tol * h_norm.max(f64::MIN_POSITIVE) {
            return Err(MatfunError::ClassMismatch {
                class: herm_class,
                defect,
            });
        }
        Ok(Self {
            matrix,
            beta,
            herm_class,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn beta(&self) -> &CMat {
        &self.beta
    }

    pub fn herm_class(&self) -> HermClass {
        self.herm_class
    }

    /// `(even, odd)` parts with respect to `β`.
    pub fn even_odd_split(&self) -> (CMat, CMat) {
        (
            even_part(&self.matrix, &self.beta),
            odd_part(&self.matrix, &self.beta),
        )
    }
}

/// The pieces of `H = βM + E + O` with `M`, `E` even and `O` odd.
#[derive(Debug, Clone, PartialEq)]
pub struct FwParts {
    pub m: CMat,
    pub e: CMat,
    pub o: CMat,
}

impl FwParts {
    pub fn assemble(&self, beta: &CMat) -> CMat {
        beta_left(beta, &self.m) + &self.e + &self.o
    }
}
