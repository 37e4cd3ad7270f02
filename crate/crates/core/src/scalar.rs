//! Scalar backends.
//!
//! Axiom checks run on exact rationals by default, where a residual is either
//! identically zero or a nonzero witness. Anything downstream of irrational
//! data (trajectories, numerically found representations) runs on `f64` with
//! an explicit tolerance.

use std::fmt::{Debug, Display};

use num::bigint::BigInt;
use num::{BigRational, Num, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Default tolerance for the floating-point backend.
pub const FLOAT_TOLERANCE: f64 = 1e-10;

/// Field elements the algebra code is generic over.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + Num + Signed + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and residuals are decided without tolerance.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// `|self|` as a float. Nonzero exact values never round to `0.0`, so a
    /// residual report can not hide a nonzero exact witness.
    fn magnitude(&self) -> f64 {
        let m = self.to_f64().abs();
        if Self::EXACT && m == 0.0 && !self.is_zero() {
            f64::MIN_POSITIVE
        } else {
            m
        }
    }

    /// Zero test against a tolerance. The exact backend ignores `tol`.
    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    /// Default verification tolerance for this backend.
    fn default_tolerance() -> f64 {
        if Self::EXACT {
            0.0
        } else {
            FLOAT_TOLERANCE
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Shorthand for an exact rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// Shorthand for an exact integer.
pub fn int(n: i64) -> Rational {
    Rational::from_ratio(n, 1)
}

/// Parses `"3"`, `"-3/4"` or `"0.25"` into an exact rational. Decimal input is
/// converted exactly from its decimal expansion, not from the nearest double.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let mut n = BigInt::from_str_radix(&digits, 10).ok()?;
        if negative {
            n = -n;
        }
        let d = num::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(n, d));
    }
    let n: BigInt = text.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// Exact rational for a finite double (every double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

/// Converts an exact rational to `(num, den)` when both fit in `i64`.
pub fn to_i64_pair(r: &Rational) -> Option<(i64, i64)> {
    Some((r.numer().to_i64()?, r.denom().to_i64()?))
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("-3/4"), Some(rat(-3, 4)));
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn exact_magnitude_never_hides_a_witness() {
        let tiny = BigRational::new(BigInt::from(1), num::pow(BigInt::from(10), 400));
        assert!(tiny.magnitude() > 0.0);
        assert!(!tiny.is_negligible(1.0));
        assert!(1e-12f64.is_negligible(1e-10));
    }
}
