//! The exact FW Hamiltonian as a weight-truncated series.
//!
//! The Eriksen operator `U = (1 + βλ)/sqrt(2 + βλ + λβ)` with the sign
//! operator `λ = H (H²)^(-1/2)` is expanded entirely in [`NcPoly`] arithmetic
//! for the stationary Dirac Hamiltonian `H = βm + E + O`. Both inverse square
//! roots are expanded as scalar binomial series in a single self-commuting
//! argument (`K = H²/m² - 1` and `Δ = βλ + λβ - 2`), each of minimum weight two.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::fseries::binomial_series;
use crate::ncalg::{format_rational, rat, NcPoly, Rational, Word};
use crate::pattern::{anti, beta, comm, e, o, pow, product, scaled, sum, PatternExpr};

/// Largest weight the reference series is known to.
pub const REFERENCE_WEIGHT: u32 = 8;

/// Largest weight the pipeline will compute.
pub const MAX_COMPUTE_WEIGHT: u32 = 12;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EriksenError {
    #[error("weight {0} outside the supported range 1..={1}")]
    WeightOutOfRange(u32, u32),
    #[error("denominator argument has a nonzero odd part starting at weight {0}")]
    NonEvenDenominator(u32),
    #[error("transformed Hamiltonian keeps an odd part starting at weight {0}")]
    ResidualOddPart(u32),
    #[error(transparent)]
    Pattern(#[from] crate::pattern::PatternError),
}

/// `H = βm + E + O`.
pub fn dirac_hamiltonian() -> NcPoly {
    &(&NcPoly::beta().scale_m(1) + &NcPoly::e()) + &NcPoly::o()
}

/// `sum_k c_k x^k` with `c_k` the coefficients of `(1 + u)^alpha`, truncated.
///
/// `x` must have minimum weight at least 2, so `weight_max / 2` powers suffice.
fn binomial_of(x: &NcPoly, alpha: &Rational, weight_max: u32) -> NcPoly {
    let n = (weight_max / 2) as usize;
    let coeffs = binomial_series(alpha, n);
    let mut acc = NcPoly::one();
    let mut power = NcPoly::one();
    for c in coeffs.coeffs().iter().skip(1) {
        power = power.mul(x, weight_max);
        if power.is_zero() {
            break;
        }
        acc = &acc + &power.scale(c);
    }
    acc
}

/// All stages of the symbolic Eriksen transformation at one truncation weight.
#[derive(Clone, Debug)]
pub struct EriksenPipeline {
    weight_max: u32,
    h: NcPoly,
    h_squared: NcPoly,
    k: NcPoly,
    lambda: NcPoly,
    delta: NcPoly,
    u_e: NcPoly,
}

impl EriksenPipeline {
    pub fn new(weight_max: u32) -> Result<Self, EriksenError> {
        if !(1..=MAX_COMPUTE_WEIGHT).contains(&weight_max) {
            return Err(EriksenError::WeightOutOfRange(
                weight_max,
                MAX_COMPUTE_WEIGHT,
            ));
        }
        let w = weight_max;
        let h = dirac_hamiltonian();
        let h_squared = h.mul(&h, w);
        let k = (&h_squared - &NcPoly::m_pow(2)).scale_m(-2);
        let inv_sqrt_k = binomial_of(&k, &rat(-1, 2), w);
        let lambda = h.scale_m(-1).mul(&inv_sqrt_k, w);

        let b = NcPoly::beta();
        let beta_lambda = b.mul(&lambda, w);
        let two = NcPoly::scalar(rat(2, 1));
        let delta = &(&beta_lambda + &lambda.mul(&b, w)) - &two;
        let (_, delta_odd) = delta.even_odd_split();
        if let Some(wt) = delta_odd.min_weight() {
            return Err(EriksenError::NonEvenDenominator(wt));
        }
        // (2 + βλ + λβ)^(-1/2) = (1/2) (1 + Δ/4)^(-1/2)
        let d_inv_sqrt = binomial_of(&delta.scale(&rat(1, 4)), &rat(-1, 2), w).scale(&rat(1, 2));
        let u_e = (&NcPoly::one() + &beta_lambda).mul(&d_inv_sqrt, w);

        Ok(Self {
            weight_max,
            h,
            h_squared,
            k,
            lambda,
            delta,
            u_e,
        })
    }

    pub fn weight_max(&self) -> u32 {
        self.weight_max
    }

    pub fn hamiltonian(&self) -> &NcPoly {
        &self.h
    }

    pub fn h_squared(&self) -> &NcPoly {
        &self.h_squared
    }

    /// `K = H²/m² - 1`.
    pub fn k(&self) -> &NcPoly {
        &self.k
    }

    pub fn sign_operator(&self) -> &NcPoly {
        &self.lambda
    }

    /// `Δ = βλ + λβ - 2`.
    pub fn delta(&self) -> &NcPoly {
        &self.delta
    }

    pub fn unitary(&self) -> &NcPoly {
        &self.u_e
    }

    /// `β U β`, the inverse of `U` by the Eriksen identity.
    pub fn unitary_inverse(&self) -> NcPoly {
        self.u_e.beta_conjugate()
    }

    /// `U H U⁻¹`, checked to be even.
    pub fn fw_hamiltonian(&self) -> Result<NcPoly, EriksenError> {
        let w = self.weight_max;
        let h_fw = self.u_e.mul(&self.h, w).mul(&self.unitary_inverse(), w);
        let (_, odd) = h_fw.even_odd_split();
        match odd.min_weight() {
            Some(wt) => Err(EriksenError::ResidualOddPart(wt)),
            None => Ok(h_fw),
        }
    }
}

pub fn sign_operator(weight_max: u32) -> Result<NcPoly, EriksenError> {
    Ok(EriksenPipeline::new(weight_max)?.lambda)
}

pub fn eriksen_unitary(weight_max: u32) -> Result<NcPoly, EriksenError> {
    Ok(EriksenPipeline::new(weight_max)?.u_e)
}

pub fn fw_hamiltonian_series(weight_max: u32) -> Result<NcPoly, EriksenError> {
    EriksenPipeline::new(weight_max)?.fw_hamiltonian()
}

/// One structured term of the reference FW series: `coeff · m^m_power · expr`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceTerm {
    pub label: String,
    pub coeff: Rational,
    pub m_power: i32,
    pub expr: PatternExpr,
}

impl ReferenceTerm {
    fn new(label: &str, coeff: Rational, m_power: i32, expr: PatternExpr) -> Self {
        Self {
            label: label.to_string(),
            coeff,
            m_power,
            expr,
        }
    }

    pub fn full_expr(&self) -> PatternExpr {
        scaled(self.coeff.clone(), self.m_power, self.expr.clone())
    }

    pub fn expand(&self, weight_max: u32) -> Result<NcPoly, EriksenError> {
        Ok(self.full_expr().to_ncpoly(weight_max)?)
    }
}

/// The de Vries–Jonker FW series through `(v/c)^8` in multiple-commutator form,
/// including the seven-term `A24` block (two `E`, four `O`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceSeries {
    terms: Vec<ReferenceTerm>,
}

/// Labels of the `A24` sub-terms in order.
pub const A24_LABELS: [&str; 7] = [
    "a24.o2_oe_sq",
    "a24.o2e_sq",
    "a24.o2_o2ee",
    "a24.o_o_o2ee",
    "a24.o_o_o2e_e",
    "a24.o_oe_o2e",
    "a24.o2_o_oee",
];

impl ReferenceSeries {
    pub fn devries_jonker() -> Self {
        let o2 = || pow(o(), 2);
        let oe = || comm(o(), e());
        let o2e = || comm(o2(), e());
        let c1 = || comm(o(), oe());
        let oee = || comm(oe(), e());
        let one = PatternExpr::One;

        let mut terms = vec![
            ReferenceTerm::new(
                "mass",
                Rational::one(),
                0,
                product(vec![
                    beta(),
                    sum(vec![
                        scaled(rat(1, 1), 1, one.clone()),
                        scaled(rat(1, 2), -1, o2()),
                        scaled(rat(-1, 8), -3, pow(o(), 4)),
                        scaled(rat(1, 16), -5, pow(o(), 6)),
                        scaled(rat(-5, 128), -7, pow(o(), 8)),
                    ]),
                ]),
            ),
            ReferenceTerm::new("field", Rational::one(), 0, e()),
            ReferenceTerm::new(
                "o_o_e",
                rat(-1, 128),
                -6,
                anti(
                    sum(vec![
                        scaled(rat(8, 1), 4, one.clone()),
                        scaled(rat(-6, 1), 2, o2()),
                        scaled(rat(5, 1), 0, pow(o(), 4)),
                    ]),
                    c1(),
                ),
            ),
            ReferenceTerm::new(
                "o2_o2_e",
                rat(1, 512),
                -6,
                anti(
                    sum(vec![
                        scaled(rat(2, 1), 2, one.clone()),
                        scaled(rat(-1, 1), 0, o2()),
                    ]),
                    comm(o2(), o2e()),
                ),
            ),
            ReferenceTerm::new(
                "o_oee",
                rat(1, 16),
                -3,
                product(vec![beta(), anti(o(), oee())]),
            ),
            ReferenceTerm::new("o_oeee", rat(-1, 32), -4, comm(o(), comm(oee(), e()))),
            ReferenceTerm::new(
                "o2_o2_o_oe",
                rat(11, 1024),
                -6,
                comm(o2(), comm(o2(), c1())),
            ),
        ];

        let a24_patterns = [
            (rat(24, 1), anti(o2(), pow(oe(), 2))),
            (rat(-20, 1), pow(o2e(), 2)),
            (rat(-14, 1), anti(o2(), comm(o2e(), e()))),
            (rat(-4, 1), comm(o(), comm(o(), comm(o2e(), e())))),
            (rat(9, 2), comm(comm(o(), comm(o(), o2e())), e())),
            (rat(-9, 2), comm(c1(), o2e())),
            (rat(5, 2), comm(o2(), comm(o(), oee()))),
        ];
        for (label, (c, p)) in A24_LABELS.iter().zip(a24_patterns) {
            // A24 = (1/256 m^5) β ( ... )
            terms.push(ReferenceTerm::new(
                label,
                c * rat(1, 256),
                -5,
                product(vec![beta(), p]),
            ));
        }
        Self { terms }
    }

    pub fn terms(&self) -> &[ReferenceTerm] {
        &self.terms
    }

    /// Replace the inner coefficient (the one multiplying `β(...)/256m⁵`) of an
    /// `A24` sub-term.
    pub fn with_a24_coefficient(mut self, index: usize, inner: Rational) -> Self {
        let label = A24_LABELS[index];
        let term = self
            .terms
            .iter_mut()
            .find(|t| t.label == label)
            .expect("A24 term present");
        term.coeff = inner * rat(1, 256);
        self
    }

    /// Append a term, e.g. to probe how consumers treat unexpected shapes.
    pub fn with_extra_term(mut self, term: ReferenceTerm) -> Self {
        self.terms.push(term);
        self
    }

    pub fn a24_inner_coefficient(&self, index: usize) -> Rational {
        let label = A24_LABELS[index];
        let t = self
            .terms
            .iter()
            .find(|t| t.label == label)
            .expect("A24 term present");
        &t.coeff * rat(256, 1)
    }

    pub fn expand(&self, weight_max: u32) -> Result<NcPoly, EriksenError> {
        let mut acc = NcPoly::zero();
        for t in &self.terms {
            acc = &acc + &t.expand(weight_max)?;
        }
        Ok(acc)
    }
}

pub fn reference_devries_jonker(weight_max: u32) -> Result<NcPoly, EriksenError> {
    if weight_max > REFERENCE_WEIGHT {
        return Err(EriksenError::WeightOutOfRange(weight_max, REFERENCE_WEIGHT));
    }
    ReferenceSeries::devries_jonker().expand(weight_max)
}

/// One word whose coefficients differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub beta: u8,
    pub word: String,
    pub m_power: i32,
    pub lhs: String,
    pub rhs: String,
    pub delta: String,
}

/// Word-by-word comparison of two polynomials, sorted like the JSON term form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffReport {
    pub entries: Vec<DiffEntry>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// The difference `lhs - rhs` as a polynomial.
    pub fn delta_poly(&self) -> NcPoly {
        let terms: Vec<_> = self
            .entries
            .iter()
            .map(|d| crate::ncalg::TermJson {
                beta: d.beta,
                word: d.word.clone(),
                m_power: d.m_power,
                coeff: d.delta.clone(),
            })
            .collect();
        NcPoly::from_json_terms(&terms).expect("entries are produced from valid words")
    }
}

pub fn compare_series(a: &NcPoly, b: &NcPoly) -> DiffReport {
    let diff = a - b;
    let entries = diff
        .to_json_terms()
        .into_iter()
        .map(|t| {
            let atoms: Vec<_> = t
                .word
                .chars()
                .map(|c| {
                    if c == 'E' {
                        crate::ncalg::Atom::E
                    } else {
                        crate::ncalg::Atom::O
                    }
                })
                .collect();
            let w = Word::normal(t.beta == 1, &atoms, t.m_power);
            DiffEntry {
                beta: t.beta,
                word: t.word,
                m_power: t.m_power,
                lhs: format_rational(&a.coeff(&w)),
                rhs: format_rational(&b.coeff(&w)),
                delta: t.coeff,
            }
        })
        .collect();
    DiffReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{Atom, UNTRUNCATED};

    #[test]
    fn sign_operator_low_weights() {
        let l1 = sign_operator(1).unwrap();
        assert_eq!(l1, &NcPoly::beta() + &NcPoly::o().scale_m(-1));

        let l2 = sign_operator(2).unwrap();
        let expected = &l1
            - &NcPoly::beta()
                .mul(&NcPoly::o().pow(2, UNTRUNCATED), UNTRUNCATED)
                .scale(&rat(1, 2))
                .scale_m(-2);
        assert_eq!(l2, expected);
    }

    #[test]
    fn sign_operator_squares_to_one() {
        let l = sign_operator(4).unwrap();
        assert_eq!(l.mul(&l, 4), NcPoly::one());
    }

    #[test]
    fn unitary_at_weight_two() {
        let u = eriksen_unitary(2).unwrap();
        let bo = NcPoly::beta()
            .mul(&NcPoly::o(), 2)
            .scale_m(-1)
            .scale(&rat(1, 2));
        let o2 = NcPoly::o().pow(2, 2).scale_m(-2).scale(&rat(-1, 8));
        assert_eq!(u, &(&NcPoly::one() + &bo) + &o2);
    }

    #[test]
    fn eriksen_condition_and_unitarity() {
        let p = EriksenPipeline::new(6).unwrap();
        let u = p.unitary();
        let b = NcPoly::beta();
        let lhs = &b.mul(u, 6) - &u.adjoint().mul(&b, 6);
        assert!(lhs.is_zero());
        assert_eq!(u.mul(&p.unitary_inverse(), 6), NcPoly::one());
    }

    #[test]
    fn h_squared_structure() {
        let p = EriksenPipeline::new(4).unwrap();
        let e = NcPoly::e();
        let o = NcPoly::o();
        let expected = [
            NcPoly::m_pow(2),
            NcPoly::beta().mul(&e, 4).scale_m(1).scale(&rat(2, 1)),
            e.mul(&e, 4),
            e.anticommutator(&o, 4),
            o.mul(&o, 4),
        ]
        .iter()
        .fold(NcPoly::zero(), |acc, x| &acc + x);
        assert_eq!(*p.h_squared(), expected);
    }

    #[test]
    fn low_order_fw_hamiltonian() {
        let h = fw_hamiltonian_series(2).unwrap();
        let expected = &(&NcPoly::beta().scale_m(1) + &NcPoly::e())
            + &NcPoly::beta()
                .mul(&NcPoly::o().pow(2, 2), 2)
                .scale(&rat(1, 2))
                .scale_m(-1);
        assert_eq!(h, expected);
    }

    #[test]
    fn weight_four_has_darwin_and_o4_terms() {
        let h = fw_hamiltonian_series(4).unwrap();
        assert_eq!(h.coeff_of(true, &[Atom::O; 4], -3), rat(-1, 8));
        // -(1/8m²)[O,[O,E]] = -(1/8)(OOE - 2OEO + EOO)/m²
        assert_eq!(
            h.coeff_of(false, &[Atom::O, Atom::E, Atom::O], -2),
            rat(1, 4)
        );
        assert_eq!(
            h.coeff_of(false, &[Atom::O, Atom::O, Atom::E], -2),
            rat(-1, 8)
        );
    }

    #[test]
    fn reference_coefficients() {
        let r = reference_devries_jonker(8).unwrap();
        assert_eq!(r.coeff_of(true, &[Atom::O; 8], -7), rat(-5, 128));
        let low = r.truncate(2);
        assert_eq!(low, fw_hamiltonian_series(2).unwrap());
        let s = ReferenceSeries::devries_jonker();
        assert_eq!(s.a24_inner_coefficient(0), rat(24, 1));
        assert!(reference_devries_jonker(9).is_err());
    }

    #[test]
    fn compare_identical_is_empty() {
        let r = reference_devries_jonker(6).unwrap();
        assert!(compare_series(&r, &r).is_empty());
    }

    #[test]
    fn weight_range_checked() {
        assert_eq!(
            EriksenPipeline::new(0).unwrap_err(),
            EriksenError::WeightOutOfRange(0, MAX_COMPUTE_WEIGHT)
        );
    }
}
