//! Truncated formal power series over exact rationals.
//!
//! Series are dense: `coeffs[k]` multiplies `u^k` for `k = 0..=order_max`.
//! Every binary operation truncates to the smaller order of its operands.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::ncalg::{format_rational, Rational};

pub const DEFAULT_ORDER: usize = 12;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("constant term is zero")]
    ZeroConstantTerm,
    #[error("composition needs an inner series without constant term")]
    CompositionOrderViolation,
    #[error("constant term {0} is not the square of a rational")]
    NonSquareConstant(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatSeries {
    coeffs: Vec<Rational>,
}

impl RatSeries {
    /// Series from the given coefficients; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least a constant term"
        );
        Self { coeffs }
    }

    pub fn zero(order_max: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order_max + 1],
        }
    }

    pub fn constant(c: Rational, order_max: usize) -> Self {
        let mut s = Self::zero(order_max);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order_max: usize) -> Self {
        Self::constant(Rational::one(), order_max)
    }

    /// The series `u`.
    pub fn variable(order_max: usize) -> Self {
        let mut s = Self::zero(order_max);
        if order_max >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    pub fn from_i64(num_den: &[(i64, i64)]) -> Self {
        Self::new(
            num_den
                .iter()
                .map(|&(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
                .collect(),
        )
    }

    pub fn order_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `u^k`; zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn truncate(&self, order_max: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order_max + 1, Rational::zero());
        Self { coeffs: c }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Formal derivative; the order drops by one (floored at zero).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        }
    }

    /// Multiplicative inverse.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let n = self.order_max();
        let mut b = vec![Rational::zero(); n + 1];
        b[0] = c0.recip();
        for k in 1..=n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                acc += &self.coeffs[j] * &b[k - j];
            }
            b[k] = -acc / c0;
        }
        Ok(Self { coeffs: b })
    }

    /// Principal square root (positive constant term).
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let a0 =
            rational_sqrt(c0).ok_or_else(|| SeriesError::NonSquareConstant(format_rational(c0)))?;
        let n = self.order_max();
        let mut a = vec![Rational::zero(); n + 1];
        let two_a0 = &a0 + &a0;
        a[0] = a0;
        for k in 1..=n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..k {
                acc -= &a[j] * &a[k - j];
            }
            a[k] = acc / &two_a0;
        }
        Ok(Self { coeffs: a })
    }

    pub fn inv_sqrt(&self) -> Result<Self, SeriesError> {
        self.sqrt()?.inverse()
    }

    /// `f(g(u))`; requires `g(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::CompositionOrderViolation);
        }
        let n = self.order_max().min(inner.order_max());
        let inner = inner.truncate(n);
        let mut acc = Self::constant(self.coeff(n), n);
        for k in (0..n).rev() {
            acc = &(&acc * &inner) + &Self::constant(self.coeffs[k].clone(), n);
        }
        Ok(acc)
    }

    /// Evaluate at a float point (diagnostics only).
    pub fn eval_f64(&self, u: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * u + c.to_f64().unwrap_or(f64::NAN))
    }
}

/// `(1 + u)^alpha` for rational `alpha`.
pub fn binomial_series(alpha: &Rational, order_max: usize) -> RatSeries {
    let mut c = vec![Rational::zero(); order_max + 1];
    c[0] = Rational::one();
    for k in 1..=order_max {
        let kq = Rational::from_integer(BigInt::from(k));
        c[k] = &c[k - 1] * (alpha - (&kq - Rational::one())) / kq;
    }
    RatSeries::new(c)
}

pub fn arctan_series(order_max: usize) -> RatSeries {
    let mut c = vec![Rational::zero(); order_max + 1];
    for (k, ck) in c.iter_mut().enumerate() {
        if k % 2 == 1 {
            let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
            *ck = Rational::new(BigInt::from(sign), BigInt::from(k));
        }
    }
    RatSeries::new(c)
}

pub fn sin_series(order_max: usize) -> RatSeries {
    trig_series(order_max, 1)
}

pub fn cos_series(order_max: usize) -> RatSeries {
    trig_series(order_max, 0)
}

pub fn tan_series(order_max: usize) -> RatSeries {
    let cos = cos_series(order_max);
    &sin_series(order_max) * &cos.inverse().expect("cos(0) = 1")
}

fn trig_series(order_max: usize, parity: usize) -> RatSeries {
    let mut c = vec![Rational::zero(); order_max + 1];
    let mut fact = BigInt::one();
    for (k, slot) in c.iter_mut().enumerate() {
        if k > 0 {
            fact *= BigInt::from(k);
        }
        if k % 2 == parity {
            let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
            *slot = Rational::new(BigInt::from(sign), fact.clone());
        }
    }
    RatSeries::new(c)
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = exact_sqrt(q.numer())?;
    let d = exact_sqrt(q.denom())?;
    Some(Rational::new(n, d))
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Add for &RatSeries {
    type Output = RatSeries;

    fn add(self, rhs: &RatSeries) -> RatSeries {
        let n = self.order_max().min(rhs.order_max());
        RatSeries {
            coeffs: (0..=n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &RatSeries {
    type Output = RatSeries;

    fn sub(self, rhs: &RatSeries) -> RatSeries {
        let n = self.order_max().min(rhs.order_max());
        RatSeries {
            coeffs: (0..=n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &RatSeries {
    type Output = RatSeries;

    fn mul(self, rhs: &RatSeries) -> RatSeries {
        let n = self.order_max().min(rhs.order_max());
        let mut c = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                c[i + j] += a * b;
            }
        }
        RatSeries { coeffs: c }
    }
}

impl Neg for &RatSeries {
    type Output = RatSeries;

    fn neg(self) -> RatSeries {
        RatSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for RatSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "({})u", format_rational(c))?,
                _ => write!(f, "({})u^{k}", format_rational(c))?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(u^{})", self.order_max() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::rat;

    fn one_plus_u(n: usize) -> RatSeries {
        &RatSeries::one(n) + &RatSeries::variable(n)
    }

    #[test]
    fn sqrt_one_plus_u_matches_mass_series() {
        let s = one_plus_u(4).sqrt().unwrap();
        assert_eq!(
            s,
            RatSeries::from_i64(&[(1, 1), (1, 2), (-1, 8), (1, 16), (-5, 128)])
        );
    }

    #[test]
    fn geometric_inverse() {
        let s = one_plus_u(2).inverse().unwrap();
        assert_eq!(s, RatSeries::from_i64(&[(1, 1), (-1, 1), (1, 1)]));
    }

    #[test]
    fn kernel_series_of_relativistic_form() {
        // 1/(8(1 + u + sqrt(1 + u))) = (1/16)(1 - 3u/4 + 5u^2/8) + O(u^3)
        let n = 2;
        let root = one_plus_u(n).sqrt().unwrap();
        let den = &(&one_plus_u(n) + &root).scale(&rat(8, 1)) + &RatSeries::zero(n);
        let g = den.inverse().unwrap();
        assert_eq!(g, RatSeries::from_i64(&[(1, 16), (-3, 64), (5, 128)]));
    }

    #[test]
    fn errors() {
        let z = RatSeries::variable(3);
        assert_eq!(z.inverse(), Err(SeriesError::ZeroConstantTerm));
        assert_eq!(z.inv_sqrt(), Err(SeriesError::ZeroConstantTerm));
        let two = RatSeries::constant(rat(2, 1), 3);
        assert!(matches!(two.sqrt(), Err(SeriesError::NonSquareConstant(_))));
        assert_eq!(
            arctan_series(3).compose(&one_plus_u(3)),
            Err(SeriesError::CompositionOrderViolation)
        );
    }

    #[test]
    fn arctan_of_tan_is_identity() {
        let n = 11;
        let id = arctan_series(n).compose(&tan_series(n)).unwrap();
        assert_eq!(id, RatSeries::variable(n));
    }

    #[test]
    fn binomial_matches_sqrt_and_inv_sqrt() {
        let n = 8;
        assert_eq!(
            binomial_series(&rat(1, 2), n),
            one_plus_u(n).sqrt().unwrap()
        );
        assert_eq!(
            binomial_series(&rat(-1, 2), n),
            one_plus_u(n).inv_sqrt().unwrap()
        );
    }

    #[test]
    fn scaled_constant_sqrt() {
        let s = RatSeries::from_i64(&[(9, 4), (3, 1)]).sqrt().unwrap();
        assert_eq!(s, RatSeries::from_i64(&[(3, 2), (1, 1)]));
    }

    #[test]
    fn eval_matches_closed_form() {
        let s = one_plus_u(DEFAULT_ORDER).sqrt().unwrap();
        assert!((s.eval_f64(0.1) - 1.1f64.sqrt()).abs() < 1e-12);
    }
}
