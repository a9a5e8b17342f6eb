//! Number carriers shared by every module.
//!
//! Two backends implement [`Scalar`]: [`Rational`] (unbounded exact
//! fractions) and `f64` (binary floating point compared through a
//! [`Tolerance`]). Verification code is written once, generic over the
//! backend; exactness follows from the carrier.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exponent::Exponent;

/// Exact rational number of unbounded size.
pub type Rational = BigRational;

/// Slack used by the float backend when checking `lhs <= rhs`.
///
/// Slack is only granted in the violation direction: `lhs` is accepted
/// iff `lhs <= rhs * (1 + rel) + abs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance { rel: 1e-9, abs: 1e-12 };

    /// Same relative slack with `extra` added to the absolute part. Used to
    /// fold a quadrature error budget into a comparison.
    pub fn widened(self, extra: f64) -> Self {
        Tolerance {
            rel: self.rel,
            abs: self.abs + extra,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic and comparisons on this carrier are exact.
    const EXACT: bool;
    const NAME: &'static str;

    fn from_u64(n: u64) -> Self;

    /// Converts a float. The exact backend takes the exact binary value.
    fn from_f64(x: f64) -> Result<Self>;

    fn to_f64(&self) -> f64;

    /// Total order; the float backend orders with `f64::total_cmp`.
    fn total_cmp(&self, other: &Self) -> Ordering;

    fn abs(&self) -> Self;

    /// `self^p` for `self >= 0`.
    ///
    /// Exact for integer `p` on the exact backend, which rejects any other
    /// exponent. The float backend calls the platform `pow` (relative
    /// error well under 1e-14) and maps `0^p` to `0`.
    fn pow_p(&self, p: Exponent) -> Result<Self>;

    /// `self <= rhs` under the backend's comparison policy. Exact backends
    /// ignore `tol`.
    fn le_with_slack(&self, rhs: &Self, tol: &Tolerance) -> bool;

    /// Parses an integer, decimal (optionally with exponent) or `a/b` literal.
    fn parse_literal(s: &str) -> Result<Self>;

    /// Report representation: `"a/b"` strings for exact values, JSON
    /// numbers for floats.
    fn to_json(&self) -> serde_json::Value;

    /// Sum of all items. Floats use compensated summation.
    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num) / Self::from_u64(den)
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_u64(2)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn from_f64(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(x)
        } else {
            Err(Error::Unrepresentable(x.to_string()))
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn pow_p(&self, p: Exponent) -> Result<Self> {
        if *self < 0.0 {
            return Err(Error::Negative(self.to_string()));
        }
        if *self == 0.0 {
            return Ok(0.0);
        }
        Ok(self.powf(p.value()))
    }

    fn le_with_slack(&self, rhs: &Self, tol: &Tolerance) -> bool {
        *self <= rhs * (1.0 + tol.rel) + tol.abs
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        let v = match s.split_once('/') {
            Some((n, d)) => {
                let n: f64 = n.trim().parse().map_err(|_| Error::Parse(s.into()))?;
                let d: f64 = d.trim().parse().map_err(|_| Error::Parse(s.into()))?;
                if d == 0.0 {
                    return Err(Error::Parse(format!("zero denominator in {s}")));
                }
                n / d
            }
            None => s.parse().map_err(|_| Error::Parse(s.into()))?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(s.into()))
        }
    }

    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().collect::<CompensatedSum>().value()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn from_u64(n: u64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_f64(x: f64) -> Result<Self> {
        Rational::from_float(x).ok_or_else(|| Error::Unrepresentable(x.to_string()))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn pow_p(&self, p: Exponent) -> Result<Self> {
        if Signed::is_negative(self) {
            return Err(Error::Negative(self.to_string()));
        }
        let n = p.as_integer().ok_or(Error::InexactPower(p.value()))? as usize;
        // Powers of coprime numerator and denominator stay coprime.
        Ok(Rational::new_raw(
            num_traits::pow(self.numer().clone(), n),
            num_traits::pow(self.denom().clone(), n),
        ))
    }

    fn le_with_slack(&self, rhs: &Self, _tol: &Tolerance) -> bool {
        self <= rhs
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = parse_decimal(n.trim())?;
                let d = parse_decimal(d.trim())?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s}")));
                }
                Ok(n / d)
            }
            None => parse_decimal(s),
        }
    }

    /// Accumulates over a running common denominator and reduces once at
    /// the end. Term denominators are small next to the accumulated one,
    /// so each step costs a big-by-small division rather than a big gcd.
    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for x in iter {
            let (n, d) = (x.numer(), x.denom());
            if !d.is_one() {
                let g = (&den % d).gcd(d);
                let widen = d / &g;
                if !widen.is_one() {
                    num *= &widen;
                    den *= &widen;
                }
            }
            num += n * (&den / d);
        }
        Rational::new(num, den)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

/// Exact decimal parse: `-12`, `0.125`, `3e-2`, `1.5E3`.
fn parse_decimal(s: &str) -> Result<Rational> {
    let err = || Error::Parse(s.to_string());
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| err())?
    };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Backend-generic sum. Floats go through [`CompensatedSum`].
pub fn sum<S: Scalar, I: IntoIterator<Item = S>>(iter: I) -> S {
    S::sum_all(iter)
}

/// `lhs / rhs`, with `0/0` defined as `0` and `None` for `x/0`, `x > 0`.
pub fn ratio<S: Scalar>(lhs: &S, rhs: &S) -> Option<S> {
    if rhs.is_zero() {
        lhs.is_zero().then(S::zero)
    } else {
        Some(lhs.clone() / rhs.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_exact_literals() {
        assert_eq!(Rational::parse_literal("3/4").unwrap(), q(3, 4));
        assert_eq!(Rational::parse_literal("0.1").unwrap(), q(1, 10));
        assert_eq!(Rational::parse_literal("-2.5e1").unwrap(), q(-25, 1));
        assert_eq!(Rational::parse_literal("1.5/0.5").unwrap(), q(3, 1));
        assert_eq!(Rational::parse_literal("7").unwrap(), q(7, 1));
        assert!(Rational::parse_literal("1/0").is_err());
        assert!(Rational::parse_literal("abc").is_err());
        assert!(Rational::parse_literal(".").is_err());
    }

    #[test]
    fn parses_float_literals() {
        assert_eq!(f64::parse_literal("1/4").unwrap(), 0.25);
        assert_eq!(f64::parse_literal(" 2.5 ").unwrap(), 2.5);
        assert!(f64::parse_literal("inf").is_err());
    }

    #[test]
    fn slack_only_in_violation_direction() {
        let tol = Tolerance::DEFAULT;
        assert!(1.0f64.le_with_slack(&1.0, &tol));
        assert!((1.0 + 1e-10f64).le_with_slack(&1.0, &tol));
        assert!(!(1.0 + 1e-8f64).le_with_slack(&1.0, &tol));
        assert!(1e-13f64.le_with_slack(&0.0, &tol));
        assert!(!q(1, 1).le_with_slack(&q(999_999_999_999, 1_000_000_000_000), &tol));
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(&0.0, &0.0), Some(0.0));
        assert_eq!(ratio(&1.0, &0.0), None);
        assert_eq!(ratio(&q(1, 2), &q(1, 4)), Some(q(2, 1)));
    }

    #[test]
    fn compensated_sum_recovers_lost_digits() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        assert_eq!(acc.value(), 1.0 + 1e-15);
    }

    #[test]
    fn exact_sum_matches_fold() {
        let terms: Vec<Rational> = (1..60).map(|i| q(i * i % 17, i * 3 + 1)).collect();
        let folded = terms.iter().fold(Rational::zero(), |a, b| a + b);
        assert_eq!(sum(terms), folded);
        assert_eq!(sum(Vec::<Rational>::new()), Rational::zero());
    }

    #[test]
    fn exact_pow_rejects_fractional_exponent() {
        let p = Exponent::new(2.5).unwrap();
        assert_eq!(q(4, 1).pow_p(p), Err(Error::InexactPower(2.5)));
        assert_eq!(q(2, 3).pow_p(Exponent::new(3.0).unwrap()).unwrap(), q(8, 27));
    }
}
