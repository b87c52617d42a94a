//! Exact non-commutative polynomials over the free monoid on `{E, O}`.
//!
//! Every word carries an optional leading parity involution `β` and a power of
//! the central mass scale `m`. `E` commutes with `β`, `O` anticommutes with it,
//! and `β² = 1`. Coefficients are arbitrary-precision rationals.
//!
//! Truncation is by *weight*: the v/c order of a term, counted as one per `O`
//! and two per `E`. The mass power never contributes because every physical
//! term is dimensionally balanced by its power of `m`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational coefficient.
pub type Rational = BigRational;

/// Weight bound that keeps every term.
pub const UNTRUNCATED: u32 = u32::MAX;

/// Default truncation weight: terms through `(v/c)^8`.
pub const DEFAULT_WEIGHT: u32 = 8;

/// Build a rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Render a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Operator atoms of the free algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    /// Even operator, commutes with `β`.
    E,
    /// Odd operator, anticommutes with `β`.
    O,
}

impl Atom {
    pub fn is_odd(self) -> bool {
        matches!(self, Atom::O)
    }

    pub fn weight(self) -> u32 {
        match self {
            Atom::E => 2,
            Atom::O => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Atom::E => 'E',
            Atom::O => 'O',
        }
    }
}

/// A letter of a raw (possibly non-normal) word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Beta,
    Atom(Atom),
}

impl Letter {
    pub const E: Letter = Letter::Atom(Atom::E);
    pub const O: Letter = Letter::Atom(Atom::O);
}

/// A monomial `β^b · w · m^k`.
///
/// Letters may contain interleaved `β` before normalization; a normal word has
/// at most one `β` and only in front.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    m_power: i32,
}

impl Word {
    pub fn new(letters: Vec<Letter>, m_power: i32) -> Self {
        Self { letters, m_power }
    }

    /// Normal word from parts.
    pub fn normal(beta: bool, atoms: &[Atom], m_power: i32) -> Self {
        let mut letters = Vec::with_capacity(atoms.len() + 1);
        if beta {
            letters.push(Letter::Beta);
        }
        letters.extend(atoms.iter().map(|&a| Letter::Atom(a)));
        Self { letters, m_power }
    }

    pub fn identity() -> Self {
        Self::new(Vec::new(), 0)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn m_power(&self) -> i32 {
        self.m_power
    }

    pub fn is_normal(&self) -> bool {
        self.letters.iter().skip(1).all(|l| *l != Letter::Beta)
    }

    /// Leading β power of a normal word.
    pub fn beta_power(&self) -> u8 {
        u8::from(self.letters.first() == Some(&Letter::Beta))
    }

    /// Atoms without the leading β.
    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.letters.iter().filter_map(|l| match l {
            Letter::Atom(a) => Some(*a),
            Letter::Beta => None,
        })
    }

    pub fn weight(&self) -> u32 {
        self.atoms().map(Atom::weight).sum()
    }

    pub fn odd_count(&self) -> usize {
        self.atoms().filter(|a| a.is_odd()).count()
    }

    pub fn is_odd(&self) -> bool {
        self.odd_count() % 2 == 1
    }

    /// Atom string such as `"EOO"`.
    pub fn atom_string(&self) -> String {
        self.atoms().map(Atom::symbol).collect()
    }

    /// Apply one local rewrite rule at position `i`, if one matches there.
    ///
    /// Rules: `x β → ±β x` (minus for `x = O`) and `β β → 1`. Returns whether
    /// the coefficient flips sign together with the rewritten word.
    pub fn rewrite_at(&self, i: usize) -> Option<(bool, Word)> {
        if i + 1 >= self.letters.len() || self.letters[i + 1] != Letter::Beta {
            return None;
        }
        let mut letters = self.letters.clone();
        match letters[i] {
            Letter::Beta => {
                letters.drain(i..i + 2);
                Some((false, Word::new(letters, self.m_power)))
            }
            Letter::Atom(a) => {
                letters.swap(i, i + 1);
                Some((a.is_odd(), Word::new(letters, self.m_power)))
            }
        }
    }

    /// Move every `β` to the front. Returns the sign picked up on the way.
    fn normalized(&self) -> (bool, Word) {
        let mut beta = false;
        let mut negate = false;
        let mut odd_seen = 0usize;
        let mut atoms = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            match l {
                Letter::Beta => {
                    beta = !beta;
                    negate ^= odd_seen % 2 == 1;
                }
                Letter::Atom(a) => {
                    if a.is_odd() {
                        odd_seen += 1;
                    }
                    atoms.push(*a);
                }
            }
        }
        (negate, Word::normal(beta, &atoms, self.m_power))
    }

    /// Product of two normal words, itself normal.
    fn mul_normal(&self, other: &Word) -> (bool, Word) {
        let negate = other.beta_power() == 1 && self.is_odd();
        let mut atoms: Vec<Atom> = self.atoms().collect();
        atoms.extend(other.atoms());
        let beta = (self.beta_power() + other.beta_power()) % 2 == 1;
        (
            negate,
            Word::normal(beta, &atoms, self.m_power + other.m_power),
        )
    }

    /// Formal adjoint: reverse the letters (all letters are self-adjoint).
    pub fn reversed(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word::new(letters, self.m_power)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            f.write_str("1")?;
        }
        for l in &self.letters {
            match l {
                Letter::Beta => f.write_str("β")?,
                Letter::Atom(a) => write!(f, "{}", a.symbol())?,
            }
        }
        match self.m_power {
            0 => Ok(()),
            1 => f.write_str("·m"),
            k if k > 0 => write!(f, "·m^{k}"),
            -1 => f.write_str("/m"),
            k => write!(f, "/m^{}", -k),
        }
    }
}

/// Exact rational linear combination of words.
///
/// All arithmetic produces normalized polynomials; [`NcPoly::from_raw`] is the
/// only way to hold non-normal words, and [`normalize`] brings them back.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NcPoly {
    terms: BTreeMap<Word, Rational>,
}

/// One entry of the stable JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub beta: u8,
    pub word: String,
    pub m_power: i32,
    pub coeff: String,
}

impl NcPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(Rational::one())
    }

    pub fn scalar(q: Rational) -> Self {
        Self::monomial(q, Word::identity())
    }

    pub fn beta() -> Self {
        Self::monomial(Rational::one(), Word::normal(true, &[], 0))
    }

    pub fn e() -> Self {
        Self::monomial(Rational::one(), Word::normal(false, &[Atom::E], 0))
    }

    pub fn o() -> Self {
        Self::monomial(Rational::one(), Word::normal(false, &[Atom::O], 0))
    }

    /// The central scalar `m^k`.
    pub fn m_pow(k: i32) -> Self {
        Self::monomial(Rational::one(), Word::new(Vec::new(), k))
    }

    /// A single term; the word is normalized.
    pub fn monomial(coeff: Rational, word: Word) -> Self {
        let mut p = Self::zero();
        let (neg, w) = word.normalized();
        p.accumulate(w, if neg { -coeff } else { coeff });
        p
    }

    /// Hold terms verbatim, without normalizing or merging signs.
    pub fn from_raw(terms: impl IntoIterator<Item = (Rational, Word)>) -> Self {
        let mut p = Self::zero();
        for (c, w) in terms {
            p.accumulate(w, c);
        }
        p
    }

    fn accumulate(&mut self, word: Word, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_normal(&self) -> bool {
        self.terms.keys().all(Word::is_normal)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &Word) -> Rational {
        self.terms.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `β^b · atoms · m^k`.
    pub fn coeff_of(&self, beta: bool, atoms: &[Atom], m_power: i32) -> Rational {
        self.coeff(&Word::normal(beta, atoms, m_power))
    }

    /// Coefficient of the bare identity word (no β, no letters, no mass).
    pub fn identity_coefficient(&self) -> Rational {
        self.coeff(&Word::identity())
    }

    /// Largest term weight, `None` for the zero polynomial.
    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(Word::weight).max()
    }

    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(Word::weight).min()
    }

    pub fn truncate(&self, weight_max: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.weight() <= weight_max)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms of exactly the given weight.
    pub fn homogeneous(&self, weight: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.weight() == weight)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * q)).collect(),
        }
    }

    /// Multiply by the central scalar `m^k`.
    pub fn scale_m(&self, k: i32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (Word::new(w.letters.clone(), w.m_power + k), c.clone()))
                .collect(),
        }
    }

    /// Normalized product, dropping terms heavier than `weight_max`.
    pub fn mul(&self, other: &Self, weight_max: u32) -> Self {
        let lhs = normalize(self);
        let rhs = normalize(other);
        let mut out = Self::zero();
        for (wa, ca) in &lhs.terms {
            let wa_weight = wa.weight();
            if wa_weight > weight_max {
                continue;
            }
            for (wb, cb) in &rhs.terms {
                if wa_weight + wb.weight() > weight_max {
                    continue;
                }
                let (neg, w) = wa.mul_normal(wb);
                let c = ca * cb;
                out.accumulate(w, if neg { -c } else { c });
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self, weight_max: u32) -> Self {
        &self.mul(other, weight_max) - &other.mul(self, weight_max)
    }

    pub fn anticommutator(&self, other: &Self, weight_max: u32) -> Self {
        &self.mul(other, weight_max) + &other.mul(self, weight_max)
    }

    /// `p^k` with truncation after each factor.
    pub fn pow(&self, k: u32, weight_max: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self, weight_max);
        }
        acc
    }

    /// `β p β`.
    pub fn beta_conjugate(&self) -> Self {
        let b = Self::beta();
        b.mul(self, UNTRUNCATED).mul(&b, UNTRUNCATED)
    }

    /// Split into the part commuting with β and the part anticommuting with it.
    pub fn even_odd_split(&self) -> (Self, Self) {
        let p = normalize(self);
        let mut even = Self::zero();
        let mut odd = Self::zero();
        for (w, c) in p.terms {
            if w.is_odd() {
                odd.accumulate(w, c);
            } else {
                even.accumulate(w, c);
            }
        }
        (even, odd)
    }

    /// Formal adjoint: letters reversed, coefficients real.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            let (neg, r) = w.reversed().normalized();
            out.accumulate(r, if neg { -c.clone() } else { c.clone() });
        }
        out
    }

    /// Stable JSON form: terms sorted by `(beta, word, m_power)`.
    pub fn to_json_terms(&self) -> Vec<TermJson> {
        let p = normalize(self);
        let mut out: Vec<TermJson> = p
            .terms
            .iter()
            .map(|(w, c)| TermJson {
                beta: w.beta_power(),
                word: w.atom_string(),
                m_power: w.m_power,
                coeff: format_rational(c),
            })
            .collect();
        out.sort_by(|a, b| (a.beta, &a.word, a.m_power).cmp(&(b.beta, &b.word, b.m_power)));
        out
    }

    pub fn from_json_terms(terms: &[TermJson]) -> Result<Self, NcAlgError> {
        let mut p = Self::zero();
        for t in terms {
            let coeff = parse_rational(&t.coeff)
                .ok_or_else(|| NcAlgError::BadCoefficient(t.coeff.clone()))?;
            let atoms = t
                .word
                .chars()
                .map(|ch| match ch {
                    'E' => Ok(Atom::E),
                    'O' => Ok(Atom::O),
                    other => Err(NcAlgError::BadLetter(other)),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if t.beta > 1 {
                return Err(NcAlgError::BadBetaPower(t.beta));
            }
            p.accumulate(Word::normal(t.beta == 1, &atoms, t.m_power), coeff);
        }
        Ok(p)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NcAlgError {
    #[error("cannot parse coefficient {0:?}")]
    BadCoefficient(String),
    #[error("unknown letter {0:?} in word")]
    BadLetter(char),
    #[error("beta power must be 0 or 1, got {0}")]
    BadBetaPower(u8),
}

/// Bring every word into normal form and merge like terms.
pub fn normalize(expr: &NcPoly) -> NcPoly {
    if expr.is_normal() {
        return expr.clone();
    }
    let mut out = NcPoly::zero();
    for (w, c) in &expr.terms {
        let (neg, n) = w.normalized();
        out.accumulate(n, if neg { -c.clone() } else { c.clone() });
    }
    out
}

impl Add for &NcPoly {
    type Output = NcPoly;

    fn add(self, rhs: &NcPoly) -> NcPoly {
        let mut out = normalize(self);
        for (w, c) in &normalize(rhs).terms {
            out.accumulate(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NcPoly {
    type Output = NcPoly;

    fn sub(self, rhs: &NcPoly) -> NcPoly {
        let mut out = normalize(self);
        for (w, c) in &normalize(rhs).terms {
            out.accumulate(w.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &NcPoly {
    type Output = NcPoly;

    fn neg(self) -> NcPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 || c.is_negative() {
                write!(f, "{}{}", if i > 0 { " " } else { "" }, sign)?;
                if i > 0 {
                    f.write_str(" ")?;
                }
            }
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "({}){w}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}
