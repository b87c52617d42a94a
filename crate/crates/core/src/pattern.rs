//! Structured operator expressions.
//!
//! A [`PatternExpr`] keeps the commutator structure of a term, which word
//! expansion destroys. The reference FW series is stored in this form so the
//! same terms can be expanded into [`NcPoly`] words or classified by ℏ-grade.

use std::fmt;

use num_traits::{One, Zero};

use crate::ncalg::{format_rational, NcPoly, Rational};

/// Operator symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternAtom {
    /// Odd part of the Hamiltonian.
    O,
    /// Even part commuting with β (stationary field term).
    E,
    /// Mass operator; the scalar `m` for a Dirac particle.
    M,
    /// `{1/(2M), O}`.
    X,
    /// `E - iħ∂/∂t`; equal to `E` in the stationary case.
    F,
    /// Generator of the first exponential transformation.
    S,
    /// Generator of the second exponential transformation.
    SPrime,
    /// `sqrt(M² + O²)`.
    Epsilon,
    Beta,
    /// Imaginary unit, a central scalar.
    I,
}

impl PatternAtom {
    pub fn is_odd(self) -> bool {
        matches!(
            self,
            PatternAtom::O | PatternAtom::X | PatternAtom::S | PatternAtom::SPrime
        )
    }

    fn symbol(self) -> &'static str {
        match self {
            PatternAtom::O => "O",
            PatternAtom::E => "E",
            PatternAtom::M => "M",
            PatternAtom::X => "X",
            PatternAtom::F => "F",
            PatternAtom::S => "S",
            PatternAtom::SPrime => "S'",
            PatternAtom::Epsilon => "ε",
            PatternAtom::Beta => "β",
            PatternAtom::I => "i",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternExpr {
    One,
    Atom(PatternAtom),
    /// `coeff · m^m_power · expr`.
    Scaled {
        coeff: Rational,
        m_power: i32,
        expr: Box<PatternExpr>,
    },
    Sum(Vec<PatternExpr>),
    Product(Vec<PatternExpr>),
    Pow(Box<PatternExpr>, u32),
    Commutator(Box<PatternExpr>, Box<PatternExpr>),
    Anticommutator(Box<PatternExpr>, Box<PatternExpr>),
    /// An operator function of `arg`; `odd` records its β-parity.
    Function {
        name: String,
        arg: Box<PatternExpr>,
        odd: bool,
    },
}

/// β-parity of a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    fn combine(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Mixed, _) | (_, Parity::Mixed) => Parity::Mixed,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("symbol {0} has no word expansion in the Dirac stationary algebra")]
    NotExpandable(String),
}

pub fn o() -> PatternExpr {
    PatternExpr::Atom(PatternAtom::O)
}

pub fn e() -> PatternExpr {
    PatternExpr::Atom(PatternAtom::E)
}

pub fn beta() -> PatternExpr {
    PatternExpr::Atom(PatternAtom::Beta)
}

pub fn atom(a: PatternAtom) -> PatternExpr {
    PatternExpr::Atom(a)
}

pub fn pow(x: PatternExpr, k: u32) -> PatternExpr {
    PatternExpr::Pow(Box::new(x), k)
}

pub fn comm(a: PatternExpr, b: PatternExpr) -> PatternExpr {
    PatternExpr::Commutator(Box::new(a), Box::new(b))
}

pub fn anti(a: PatternExpr, b: PatternExpr) -> PatternExpr {
    PatternExpr::Anticommutator(Box::new(a), Box::new(b))
}

pub fn product(factors: Vec<PatternExpr>) -> PatternExpr {
    PatternExpr::Product(factors)
}

pub fn sum(terms: Vec<PatternExpr>) -> PatternExpr {
    PatternExpr::Sum(terms)
}

pub fn scaled(coeff: Rational, m_power: i32, expr: PatternExpr) -> PatternExpr {
    PatternExpr::Scaled {
        coeff,
        m_power,
        expr: Box::new(expr),
    }
}

pub fn func(name: &str, arg: PatternExpr, odd: bool) -> PatternExpr {
    PatternExpr::Function {
        name: name.to_string(),
        arg: Box::new(arg),
        odd,
    }
}

impl PatternExpr {
    pub fn parity(&self) -> Parity {
        match self {
            PatternExpr::One => Parity::Even,
            PatternExpr::Atom(a) => {
                if a.is_odd() {
                    Parity::Odd
                } else {
                    Parity::Even
                }
            }
            PatternExpr::Scaled { expr, .. } => expr.parity(),
            PatternExpr::Sum(ts) => {
                let mut it = ts.iter().map(PatternExpr::parity);
                let first = it.next().unwrap_or(Parity::Even);
                if it.all(|p| p == first) {
                    first
                } else {
                    Parity::Mixed
                }
            }
            PatternExpr::Product(fs) => fs
                .iter()
                .fold(Parity::Even, |acc, f| acc.combine(f.parity())),
            PatternExpr::Pow(x, k) => {
                if k % 2 == 0 {
                    match x.parity() {
                        Parity::Mixed => Parity::Mixed,
                        _ => Parity::Even,
                    }
                } else {
                    x.parity()
                }
            }
            PatternExpr::Commutator(a, b) | PatternExpr::Anticommutator(a, b) => {
                a.parity().combine(b.parity())
            }
            PatternExpr::Function { odd, .. } => {
                if *odd {
                    Parity::Odd
                } else {
                    Parity::Even
                }
            }
        }
    }

    /// A central scalar (identity, `i`, or a scaled scalar).
    pub fn is_scalar(&self) -> bool {
        match self {
            PatternExpr::One | PatternExpr::Atom(PatternAtom::I) => true,
            PatternExpr::Scaled { expr, .. } => expr.is_scalar(),
            PatternExpr::Product(fs) => fs.iter().all(PatternExpr::is_scalar),
            _ => false,
        }
    }

    /// Expand into normalized words for the Dirac stationary case
    /// (`M = m`, `F = E`).
    pub fn to_ncpoly(&self, weight_max: u32) -> Result<NcPoly, PatternError> {
        Ok(match self {
            PatternExpr::One => NcPoly::one(),
            PatternExpr::Atom(a) => match a {
                PatternAtom::O => NcPoly::o(),
                PatternAtom::E | PatternAtom::F => NcPoly::e(),
                PatternAtom::M => NcPoly::m_pow(1),
                PatternAtom::Beta => NcPoly::beta(),
                other => return Err(PatternError::NotExpandable(other.symbol().into())),
            },
            PatternExpr::Scaled {
                coeff,
                m_power,
                expr,
            } => expr.to_ncpoly(weight_max)?.scale(coeff).scale_m(*m_power),
            PatternExpr::Sum(ts) => {
                let mut acc = NcPoly::zero();
                for t in ts {
                    acc = &acc + &t.to_ncpoly(weight_max)?;
                }
                acc
            }
            PatternExpr::Product(fs) => {
                let mut acc = NcPoly::one();
                for f in fs {
                    acc = acc.mul(&f.to_ncpoly(weight_max)?, weight_max);
                }
                acc
            }
            PatternExpr::Pow(x, k) => x.to_ncpoly(weight_max)?.pow(*k, weight_max),
            PatternExpr::Commutator(a, b) => a
                .to_ncpoly(weight_max)?
                .commutator(&b.to_ncpoly(weight_max)?, weight_max),
            PatternExpr::Anticommutator(a, b) => a
                .to_ncpoly(weight_max)?
                .anticommutator(&b.to_ncpoly(weight_max)?, weight_max),
            PatternExpr::Function { name, .. } => {
                return Err(PatternError::NotExpandable(name.clone()))
            }
        }
        .truncate(weight_max))
    }

    /// If this is `O^(2j)` (or the identity for `j = 0`), return `j`.
    pub fn as_even_power_of_o(&self) -> Option<u32> {
        match self {
            PatternExpr::One => Some(0),
            PatternExpr::Atom(PatternAtom::O) => None,
            PatternExpr::Pow(x, k) if **x == o() && k % 2 == 0 => Some(k / 2),
            _ => None,
        }
    }

    /// Flatten `Sum` of `Scaled(c, k, O^(2j))` into `(c, k, j)` triples.
    pub fn as_o_squared_polynomial(&self) -> Option<Vec<(Rational, i32, u32)>> {
        let terms: Vec<&PatternExpr> = match self {
            PatternExpr::Sum(ts) => ts.iter().collect(),
            other => vec![other],
        };
        terms
            .into_iter()
            .map(|t| match t {
                PatternExpr::Scaled {
                    coeff,
                    m_power,
                    expr,
                } => expr
                    .as_even_power_of_o()
                    .map(|j| (coeff.clone(), *m_power, j)),
                other => other.as_even_power_of_o().map(|j| (Rational::one(), 0, j)),
            })
            .collect()
    }
}

impl fmt::Display for PatternExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternExpr::One => f.write_str("1"),
            PatternExpr::Atom(a) => f.write_str(a.symbol()),
            PatternExpr::Scaled {
                coeff,
                m_power,
                expr,
            } => {
                if !coeff.is_one() {
                    write!(f, "({})", format_rational(coeff))?;
                }
                match *m_power {
                    0 => {}
                    k if k > 0 => write!(f, "m^{k}·")?,
                    k => write!(f, "m^({k})·")?,
                }
                if coeff.is_zero() {
                    return Ok(());
                }
                write!(f, "{expr}")
            }
            PatternExpr::Sum(ts) => {
                f.write_str("(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            PatternExpr::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("·")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            PatternExpr::Pow(x, k) => write!(f, "{x}^{k}"),
            PatternExpr::Commutator(a, b) => write!(f, "[{a},{b}]"),
            PatternExpr::Anticommutator(a, b) => write!(f, "{{{a},{b}}}"),
            PatternExpr::Function { name, arg, .. } => write!(f, "{name}({arg})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{rat, Atom};

    #[test]
    fn parity_of_nested_commutators() {
        assert_eq!(comm(o(), e()).parity(), Parity::Odd);
        assert_eq!(comm(o(), comm(o(), e())).parity(), Parity::Even);
        assert_eq!(pow(o(), 2).parity(), Parity::Even);
        assert_eq!(sum(vec![o(), e()]).parity(), Parity::Mixed);
    }

    #[test]
    fn expansion_of_double_commutator() {
        // [O,[O,E]] = OOE - 2 OEO + EOO
        let p = comm(o(), comm(o(), e())).to_ncpoly(8).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(
            p.coeff_of(false, &[Atom::O, Atom::E, Atom::O], 0),
            rat(-2, 1)
        );
    }

    #[test]
    fn functions_do_not_expand() {
        let f = func("sqrt", atom(PatternAtom::X), false);
        assert!(matches!(
            f.to_ncpoly(8),
            Err(PatternError::NotExpandable(_))
        ));
    }

    #[test]
    fn recognizes_o_squared_polynomials() {
        let p = sum(vec![
            scaled(rat(8, 1), 4, PatternExpr::One),
            scaled(rat(-6, 1), 2, pow(o(), 2)),
            scaled(rat(5, 1), 0, pow(o(), 4)),
        ]);
        let terms = p.as_o_squared_polynomial().unwrap();
        assert_eq!(terms[2], (rat(5, 1), 0, 2));
        assert!(comm(o(), e()).as_o_squared_polynomial().is_none());
    }
}
