//! The Hardy exponent and the constants derived from it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest integer exponent handled by exact integer powering.
const MAX_INTEGER_EXPONENT: f64 = 1024.0;

/// A Hardy exponent `p > 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 {
            Ok(Exponent(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `p` as an integer when it is one.
    pub fn as_integer(self) -> Option<u32> {
        (self.0.fract() == 0.0 && self.0 <= MAX_INTEGER_EXPONENT).then_some(self.0 as u32)
    }

    /// Conjugate exponent `p / (p - 1)`.
    pub fn conjugate(self) -> f64 {
        self.0 / (self.0 - 1.0)
    }

    /// `p / (p - 1)` on a given backend.
    pub fn conjugate_in<S: Scalar>(self) -> Result<S> {
        let p = S::from_f64(self.0)?;
        Ok(p.clone() / (p - S::one()))
    }
}

impl TryFrom<f64> for Exponent {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Exponent::new(p)
    }
}

impl From<Exponent> for f64 {
    fn from(p: Exponent) -> f64 {
        p.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `C_p = 2^(1-p) (p/(p-1))^p`, the best constant of the median Hardy
/// inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpConstant<S> {
    value: S,
}

impl<S: Scalar> SharpConstant<S> {
    pub fn value(&self) -> &S {
        &self.value
    }

    pub fn into_inner(self) -> S {
        self.value
    }
}

/// Computes `C_p`. Exact on the exact backend for integer `p`; the exact
/// backend rejects fractional `p`.
pub fn sharp_constant<S: Scalar>(p: Exponent) -> Result<SharpConstant<S>> {
    let half = S::from_ratio(1, 2);
    let value = S::from_u64(2) * pow_p(&half, p)? * hardy_constant::<S>(p)?;
    Ok(SharpConstant { value })
}

/// `(p/(p-1))^p`, the classical Hardy constant.
pub fn hardy_constant<S: Scalar>(p: Exponent) -> Result<S> {
    pow_p(&p.conjugate_in::<S>()?, p)
}

/// `x^p` for nonnegative `x`; see [`Scalar::pow_p`].
pub fn pow_p<S: Scalar>(x: &S, p: Exponent) -> Result<S> {
    x.pow_p(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::One;
    use proptest::prelude::*;

    fn p(x: f64) -> Exponent {
        Exponent::new(x).unwrap()
    }

    #[test]
    fn rejects_p_at_or_below_one() {
        for bad in [1.0, 0.5, -2.0, f64::NAN, f64::INFINITY] {
            assert!(Exponent::new(bad).is_err(), "{bad}");
        }
        assert!(Exponent::new(1.0 + 1e-12).is_ok());
        assert!(p(1.5).conjugate() > 1.0);
    }

    #[test]
    fn sharp_constant_exact_values() {
        let c2 = sharp_constant::<Rational>(p(2.0)).unwrap().into_inner();
        assert_eq!(c2, Rational::from_integer(2.into()));
        assert!(c2.denom().is_one());
        let c3 = sharp_constant::<Rational>(p(3.0)).unwrap().into_inner();
        assert_eq!(c3, Rational::new(27.into(), 32.into()));
        assert!(sharp_constant::<Rational>(p(1.5)).is_err());
    }

    #[test]
    fn sharp_constant_float_matches_high_precision_value() {
        // 2^-0.5 * 3^1.5 evaluated with 40-digit arithmetic.
        let reference = 3.674_234_614_174_767_f64;
        let c = sharp_constant::<f64>(p(1.5)).unwrap().into_inner();
        assert!((c - reference).abs() <= 1e-14 * reference, "{c}");
        assert_eq!(sharp_constant::<f64>(p(3.0)).unwrap().into_inner(), 0.84375);
    }

    #[test]
    fn sharp_constant_decreasing_on_grid() {
        let mut prev = f64::INFINITY;
        for k in 1..=2000 {
            let x = 1.0 + k as f64 * 0.005;
            let c = sharp_constant::<f64>(p(x)).unwrap().into_inner();
            assert!(c > 0.0 && c < prev, "p={x}");
            prev = c;
        }
    }

    #[test]
    fn pow_p_edge_cases() {
        for e in [1.1, 2.0, 2.5, 7.0] {
            assert_eq!(pow_p(&0.0, p(e)).unwrap(), 0.0);
            assert_eq!(pow_p(&1.0, p(e)).unwrap(), 1.0);
        }
        assert!((pow_p(&4.0, p(2.5)).unwrap() - 32.0).abs() < 1e-13);
        assert!(pow_p(&-1.0, p(2.0)).is_err());
        let minus = -Rational::one();
        assert!(pow_p(&minus, p(2.0)).is_err());
    }

    proptest! {
        #[test]
        fn pow_p_is_multiplicative(x in 0.0f64..10.0, y in 0.0f64..10.0, e in 1.01f64..6.0) {
            let e = p(e);
            let lhs = pow_p(&x, e).unwrap() * pow_p(&y, e).unwrap();
            let rhs = pow_p(&(x * y), e).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300) + 1e-300);
        }

        #[test]
        fn exact_pow_is_multiplicative(a in 0u64..50, b in 1u64..50, c in 0u64..50, d in 1u64..50, n in 2u32..6) {
            let e = p(n as f64);
            let x = Rational::from_ratio(a, b);
            let y = Rational::from_ratio(c, d);
            prop_assert_eq!(pow_p(&x, e).unwrap() * pow_p(&y, e).unwrap(), pow_p(&(x * y), e).unwrap());
        }
    }
}
