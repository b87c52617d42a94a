//! ℏ-grading of commutator patterns and the grade-≤1 FW Hamiltonian.
//!
//! Grading rules (minimum powers of ħ/S₀):
//!
//! * atoms, β, scalars and functions of grade-0 arguments have grade 0;
//! * grades add under products, powers and anticommutators;
//! * a commutator of two grade-0 operators adds one grade (`[O,E]`, `[O,M]`,
//!   `[O²,E]`, `[X,F]`), except that commutators with β or a scalar add none;
//! * a commutator of a grade-0 *odd* operator with a graded operator adds
//!   nothing (`[O,[O,E]]` stays at grade 1);
//! * every other commutator adds one (`[O²,[O,E]]`, `[[O,E],E]`).
//!
//! The even Hamiltonian through grade one has the canonical form
//! `β m f(t) + E + (1/m²) {g(t), [O,[O,E]]}` with `t = O²/m²`, stored as
//! [`GradedEvenForm`].

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::eriksen::{ReferenceSeries, ReferenceTerm};
use crate::fseries::{RatSeries, SeriesError};
use crate::ncalg::{format_rational, rat, NcPoly, Rational};
use crate::pattern::{
    anti, atom, beta, comm, e, func, o, pow, product, scaled, sum, Parity, PatternAtom, PatternExpr,
};

/// Orders the reference series supplies for each kernel.
pub const REFERENCE_F_ORDER: usize = 4;
pub const REFERENCE_G_ORDER: usize = 2;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RelFwError {
    #[error("term {0} matches no grading pattern")]
    UnclassifiableTerm(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Result of grading one pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeReport {
    /// Minimum ħ-grade.
    pub grade: u32,
    /// An even-operand commutator wraps an `[O,[O,…]]` chain, e.g.
    /// `[O²,[O,[O,E]]]`. Reported as grade ≥ 2 without a claim of equality.
    pub mixed_nesting: bool,
}

fn is_beta_or_scalar(x: &PatternExpr) -> bool {
    x.is_scalar() || matches!(x, PatternExpr::Atom(PatternAtom::Beta))
}

/// Number of nested `O`s in `[O,[O,…[O,E]…]]`, or 0 for anything else.
fn o_chain_depth(x: &PatternExpr) -> u32 {
    match x {
        PatternExpr::Commutator(a, b) if **a == o() => match **b {
            PatternExpr::Atom(PatternAtom::E | PatternAtom::F | PatternAtom::M) => 1,
            _ => match o_chain_depth(b) {
                0 => 0,
                d => d + 1,
            },
        },
        _ => 0,
    }
}

/// `[O,[O,…]]` with at least two nested `O`s.
fn is_o_chain(x: &PatternExpr) -> bool {
    o_chain_depth(x) >= 2
}

pub fn grade_report(expr: &PatternExpr) -> Result<GradeReport, RelFwError> {
    use PatternExpr::*;
    Ok(match expr {
        One | Atom(_) => GradeReport {
            grade: 0,
            mixed_nesting: false,
        },
        Scaled { coeff, expr, .. } => {
            if coeff.is_zero() {
                return Err(RelFwError::UnclassifiableTerm(format!(
                    "{expr} (zero coefficient)"
                )));
            }
            grade_report(expr)?
        }
        Sum(ts) => {
            let mut best: Option<GradeReport> = None;
            for t in ts {
                let r = grade_report(t)?;
                best = Some(match best {
                    Some(b) if b.grade <= r.grade => b,
                    _ => r,
                });
            }
            best.ok_or_else(|| RelFwError::UnclassifiableTerm("empty sum".into()))?
        }
        Product(fs) => {
            let mut acc = GradeReport {
                grade: 0,
                mixed_nesting: false,
            };
            for f in fs {
                let r = grade_report(f)?;
                acc.grade += r.grade;
                acc.mixed_nesting |= r.mixed_nesting;
            }
            acc
        }
        Pow(x, k) => {
            let r = grade_report(x)?;
            GradeReport {
                grade: r.grade * k,
                mixed_nesting: r.mixed_nesting,
            }
        }
        Anticommutator(a, b) => {
            let ra = grade_report(a)?;
            let rb = grade_report(b)?;
            GradeReport {
                grade: ra.grade + rb.grade,
                mixed_nesting: ra.mixed_nesting || rb.mixed_nesting,
            }
        }
        Commutator(a, b) => {
            let ra = grade_report(a)?;
            let rb = grade_report(b)?;
            let base = ra.grade + rb.grade;
            let mut mixed = ra.mixed_nesting || rb.mixed_nesting;
            let bump = if is_beta_or_scalar(a) || is_beta_or_scalar(b) {
                0
            } else if ra.grade == 0 && rb.grade == 0 {
                1
            } else {
                let odd_zero = |x: &PatternExpr, g: u32| g == 0 && x.parity() == Parity::Odd;
                if odd_zero(a, ra.grade) || odd_zero(b, rb.grade) {
                    0
                } else {
                    mixed |= (ra.grade == 0 && is_o_chain(b)) || (rb.grade == 0 && is_o_chain(a));
                    1
                }
            };
            GradeReport {
                grade: base + bump,
                mixed_nesting: mixed,
            }
        }
        Function { arg, .. } => {
            let r = grade_report(arg)?;
            if r.grade != 0 {
                return Err(RelFwError::UnclassifiableTerm(format!(
                    "{expr}: function of a graded argument"
                )));
            }
            r
        }
    })
}

/// Minimum ħ-grade of a pattern.
pub fn grade_audit(expr: &PatternExpr) -> Result<u32, RelFwError> {
    Ok(grade_report(expr)?.grade)
}

/// `β m f(t) + [E] + (1/m²){g(t), [O,[O,E]]}`, plus an optional kernel for
/// `β[O,[O,M]]` which vanishes identically when `M = m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedEvenForm {
    pub f: RatSeries,
    pub e_term: bool,
    pub g: RatSeries,
    pub m_kernel: Option<RatSeries>,
}

impl GradedEvenForm {
    /// Expand into words of the free algebra (Dirac case) to `weight_max`.
    pub fn expand(&self, weight_max: u32) -> NcPoly {
        let t = NcPoly::o().pow(2, weight_max).scale_m(-2);
        let series_in_t = |s: &RatSeries| {
            let mut acc = NcPoly::zero();
            let mut tp = NcPoly::one();
            for c in s.coeffs() {
                acc = &acc + &tp.scale(c);
                tp = tp.mul(&t, weight_max);
                if tp.is_zero() {
                    break;
                }
            }
            acc
        };
        let mass = NcPoly::beta()
            .scale_m(1)
            .mul(&series_in_t(&self.f), weight_max);
        let c1 = comm(o(), comm(o(), e()))
            .to_ncpoly(weight_max)
            .expect("expandable");
        let kernel = series_in_t(&self.g)
            .anticommutator(&c1, weight_max)
            .scale_m(-2);
        let mut out = &mass + &kernel;
        if self.e_term {
            out = &out + &NcPoly::e();
        }
        out.truncate(weight_max)
    }
}

/// Where each reference term went.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub kept: Vec<String>,
    pub dropped: Vec<(String, u32)>,
    /// Dropped terms whose grade is a bound from mixed nesting.
    pub flagged: Vec<String>,
}

/// Classify the reference terms and collect the grade-≤1 part.
pub fn grade_filter(
    series: &ReferenceSeries,
) -> Result<(GradedEvenForm, FilterReport), RelFwError> {
    let mut f = RatSeries::zero(REFERENCE_F_ORDER);
    let mut g = RatSeries::zero(REFERENCE_G_ORDER);
    let mut e_term = false;
    let mut report = FilterReport::default();

    for term in series.terms() {
        let gr = grade_report(&term.expr)?;
        match gr.grade {
            0 => {
                if classify_mass(term, &mut f)? || classify_field(term, &mut e_term) {
                    report.kept.push(term.label.clone());
                } else {
                    return Err(RelFwError::UnclassifiableTerm(term.label.clone()));
                }
            }
            1 => {
                classify_kernel(term, &mut g)?;
                report.kept.push(term.label.clone());
            }
            k => {
                if gr.mixed_nesting {
                    report.flagged.push(term.label.clone());
                }
                report.dropped.push((term.label.clone(), k));
            }
        }
    }
    Ok((
        GradedEvenForm {
            f,
            e_term,
            g,
            m_kernel: None,
        },
        report,
    ))
}

fn add_coeff(series: &mut RatSeries, k: usize, c: Rational, label: &str) -> Result<(), RelFwError> {
    if k > series.order_max() {
        return Err(RelFwError::UnclassifiableTerm(format!(
            "{label}: power t^{k} beyond range"
        )));
    }
    let mut coeffs = series.coeffs().to_vec();
    coeffs[k] += c;
    *series = RatSeries::new(coeffs);
    Ok(())
}

/// `β · Σ c m^k O^(2j)` with `k + 2j = 1`.
fn classify_mass(term: &ReferenceTerm, f: &mut RatSeries) -> Result<bool, RelFwError> {
    let PatternExpr::Product(fs) = &term.expr else {
        return Ok(false);
    };
    let [b, poly] = fs.as_slice() else {
        return Ok(false);
    };
    if *b != beta() {
        return Ok(false);
    }
    let Some(parts) = poly.as_o_squared_polynomial() else {
        return Ok(false);
    };
    for (c, k, j) in parts {
        if term.m_power + k + 2 * j as i32 != 1 {
            return Err(RelFwError::UnclassifiableTerm(format!(
                "{}: mass dimension",
                term.label
            )));
        }
        add_coeff(f, j as usize, &term.coeff * c, &term.label)?;
    }
    Ok(true)
}

fn classify_field(term: &ReferenceTerm, e_term: &mut bool) -> bool {
    if term.expr == e() && term.coeff.is_one() && term.m_power == 0 {
        *e_term = true;
        true
    } else {
        false
    }
}

/// `{Σ c m^k O^(2j), [O,[O,E]]}` scaled so that `k + 2j + m_power = -2`.
fn classify_kernel(term: &ReferenceTerm, g: &mut RatSeries) -> Result<(), RelFwError> {
    let bad = || RelFwError::UnclassifiableTerm(term.label.clone());
    let c1 = comm(o(), comm(o(), e()));
    let poly = match &term.expr {
        PatternExpr::Anticommutator(a, b) if **b == c1 => a.as_ref().clone(),
        PatternExpr::Anticommutator(a, b) if **a == c1 => b.as_ref().clone(),
        // bare C1 = (1/2){1, C1}
        x if *x == c1 => scaled(rat(1, 2), 0, PatternExpr::One),
        _ => return Err(bad()),
    };
    let parts = poly.as_o_squared_polynomial().ok_or_else(bad)?;
    for (c, k, j) in parts {
        if term.m_power + k + 2 * j as i32 != -2 {
            return Err(bad());
        }
        add_coeff(g, j as usize, &term.coeff * c, &term.label)?;
    }
    Ok(())
}

/// Grade-filter the encoded reference series.
pub fn eriksen_grade_filter() -> Result<(GradedEvenForm, FilterReport), RelFwError> {
    grade_filter(&ReferenceSeries::devries_jonker())
}

/// `β ε + E - (1/4){1/(2ε² + 2mε), [O,[O,E]]}` with `ε = m sqrt(1 + t)`, i.e.
/// `f = sqrt(1 + t)` and `g = -1/(8(1 + t + sqrt(1 + t)))`.
pub fn relativistic_even_form(order_max: usize) -> Result<GradedEvenForm, RelFwError> {
    let one_plus_t = &RatSeries::one(order_max) + &RatSeries::variable(order_max);
    let f = one_plus_t.sqrt()?;
    let denom = &one_plus_t + &f;
    let g = denom.inverse()?.scale(&rat(-1, 8));
    // coefficient of β[O,[O,M]]/m² in the same normalization
    let m_kernel = g.scale(&rat(-1, 1));
    Ok(GradedEvenForm {
        f,
        e_term: true,
        g,
        m_kernel: Some(m_kernel),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDiff {
    pub series: String,
    pub power: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenFormDiff {
    pub f_order: usize,
    pub g_order: usize,
    pub entries: Vec<SeriesDiff>,
}

impl EvenFormDiff {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn compare_even_forms(
    a: &GradedEvenForm,
    b: &GradedEvenForm,
    f_order: usize,
    g_order: usize,
) -> EvenFormDiff {
    let mut entries = Vec::new();
    let mut cmp = |name: &str, x: &RatSeries, y: &RatSeries, order: usize| {
        for k in 0..=order {
            let (cx, cy) = (x.coeff(k), y.coeff(k));
            if cx != cy {
                entries.push(SeriesDiff {
                    series: name.to_string(),
                    power: k,
                    lhs: format_rational(&cx),
                    rhs: format_rational(&cy),
                });
            }
        }
    };
    cmp("f", &a.f, &b.f, f_order);
    cmp("g", &a.g, &b.g, g_order);
    if a.e_term != b.e_term {
        let s = |v: bool| if v { "1" } else { "0" }.to_string();
        entries.push(SeriesDiff {
            series: "e".into(),
            power: 0,
            lhs: s(a.e_term),
            rhs: s(b.e_term),
        });
    }
    EvenFormDiff {
        f_order,
        g_order,
        entries,
    }
}

/// Operator patterns of the exponential-operator construction.
pub mod construction {
    use super::*;

    fn x() -> PatternExpr {
        atom(PatternAtom::X)
    }

    fn f() -> PatternExpr {
        atom(PatternAtom::F)
    }

    fn i() -> PatternExpr {
        atom(PatternAtom::I)
    }

    fn sqrt_1px2() -> PatternExpr {
        func("sqrt(1+X²)", pow(x(), 2), false)
    }

    /// `X = {1/(2M), O}`.
    pub fn x_operator() -> PatternExpr {
        anti(
            scaled(rat(1, 2), 0, func("inv", atom(PatternAtom::M), false)),
            o(),
        )
    }

    /// `S = -iβΘ`, `Θ = arctan(X)/2`.
    pub fn generator() -> PatternExpr {
        scaled(
            rat(-1, 2),
            0,
            product(vec![i(), beta(), func("arctan", x(), true)]),
        )
    }

    /// The residual odd term left after the first transformation.
    pub fn residual_odd_term() -> PatternExpr {
        sum(vec![
            scaled(
                rat(1, 4),
                0,
                product(vec![
                    beta(),
                    anti(func("1/sqrt(1+X²)", pow(x(), 2), false), comm(x(), f())),
                ]),
            ),
            scaled(
                rat(-1, 4),
                0,
                product(vec![
                    beta(),
                    anti(
                        func("X/(sqrt(1+X²)(1+sqrt(1+X²)))", x(), true),
                        comm(sqrt_1px2(), f()),
                    ),
                ]),
            ),
        ])
    }

    /// `S' = -(iβ/4){1/ε, O'}` in its expanded two-term form.
    pub fn second_generator() -> PatternExpr {
        let inv_eps = func("inv", atom(PatternAtom::Epsilon), false);
        sum(vec![
            scaled(
                rat(-1, 16),
                0,
                product(vec![
                    i(),
                    anti(
                        inv_eps.clone(),
                        anti(func("1/sqrt(1+X²)", pow(x(), 2), false), comm(x(), f())),
                    ),
                ]),
            ),
            scaled(
                rat(1, 32),
                0,
                product(vec![
                    i(),
                    anti(
                        inv_eps,
                        anti(
                            func("X/((1+X²)(1+sqrt(1+X²)))", x(), true),
                            comm(pow(x(), 2), f()),
                        ),
                    ),
                ]),
            ),
        ])
    }

    /// `[S, S'] = -(iβ/2){arctan X, S'}`.
    pub fn generator_commutator() -> PatternExpr {
        scaled(
            rat(-1, 2),
            0,
            product(vec![
                i(),
                beta(),
                anti(func("arctan", x(), true), atom(PatternAtom::SPrime)),
            ]),
        )
    }

    /// The even Hamiltonian left after dropping the residual odd term.
    pub fn even_hamiltonian() -> PatternExpr {
        let eps = atom(PatternAtom::Epsilon);
        let m = atom(PatternAtom::M);
        let kernel = func(
            "inv",
            sum(vec![
                scaled(rat(2, 1), 0, pow(eps.clone(), 2)),
                anti(eps.clone(), m.clone()),
            ]),
            false,
        );
        sum(vec![
            product(vec![beta(), eps]),
            atom(PatternAtom::E),
            scaled(
                rat(1, 4),
                0,
                anti(
                    kernel,
                    sum(vec![
                        product(vec![beta(), comm(o(), comm(o(), m))]),
                        scaled(rat(-1, 1), 0, comm(o(), comm(o(), f()))),
                    ]),
                ),
            ),
        ])
    }

    /// Leading correction `[½[S,S'], H'']`.
    pub fn leading_correction() -> PatternExpr {
        comm(
            scaled(
                rat(1, 2),
                0,
                comm(atom(PatternAtom::S), atom(PatternAtom::SPrime)),
            ),
            even_hamiltonian(),
        )
    }
}

/// Grades of the atoms that stand for composite operators, used when those
/// atoms appear inside larger patterns.
pub fn with_atom_grades(expr: &PatternExpr) -> PatternExpr {
    match expr {
        PatternExpr::Atom(PatternAtom::SPrime) => construction::second_generator(),
        PatternExpr::Scaled {
            coeff,
            m_power,
            expr,
        } => scaled(coeff.clone(), *m_power, with_atom_grades(expr)),
        PatternExpr::Sum(ts) => sum(ts.iter().map(with_atom_grades).collect()),
        PatternExpr::Product(fs) => product(fs.iter().map(with_atom_grades).collect()),
        PatternExpr::Pow(x, k) => pow(with_atom_grades(x), *k),
        PatternExpr::Commutator(a, b) => comm(with_atom_grades(a), with_atom_grades(b)),
        PatternExpr::Anticommutator(a, b) => anti(with_atom_grades(a), with_atom_grades(b)),
        other => other.clone(),
    }
}
