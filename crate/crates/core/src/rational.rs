//! Exact rationals restricted to the unit interval.
//!
//! Thresholds of probability operators and atom weights are both values of
//! this type. Arithmetic is done on arbitrary-precision rationals so that
//! boundary cases such as `P[i]>=1/3` against a measure of exactly `1/3`
//! compare correctly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("malformed rational `{0}`")]
    Malformed(String),
    #[error("rational `{0}` lies outside [0,1]")]
    OutOfRange(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// A rational number `r` with `0 <= r <= 1`, always in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational01(BigRational);

impl Rational01 {
    pub fn zero() -> Self {
        Rational01(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational01(BigRational::one())
    }

    /// `num/den`; fails if `den == 0` or the value is outside `[0,1]`.
    pub fn new(num: i64, den: i64) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator(format!("{num}/{den}")));
        }
        Self::from_big(BigRational::new(num.into(), den.into()))
    }

    /// Panicking shorthand for literals known to be in range.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("rational literal outside [0,1]")
    }

    pub fn from_big(value: BigRational) -> Result<Self, RationalError> {
        if value.is_negative() || value > BigRational::one() {
            return Err(RationalError::OutOfRange(value.to_string()));
        }
        Ok(Rational01(value))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `1 - r`.
    pub fn complement(&self) -> Self {
        Rational01(BigRational::one() - &self.0)
    }

    /// `min(1, r + t)`.
    pub fn saturating_add(&self, other: &Self) -> Self {
        let sum = &self.0 + &other.0;
        if sum > BigRational::one() {
            Self::one()
        } else {
            Rational01(sum)
        }
    }

    /// `r + t` when it stays within `[0,1]`.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        Self::from_big(&self.0 + &other.0).ok()
    }

    /// `r - 1/m` when it stays within `[0,1]`.
    pub fn minus_reciprocal(&self, m: u64) -> Option<Self> {
        if m == 0 {
            return None;
        }
        let step = BigRational::new(BigInt::one(), BigInt::from(m));
        Self::from_big(&self.0 - step).ok()
    }

    /// Smallest natural `m` with `m >= 1/r`; `None` for `r = 0`.
    pub fn ceil_reciprocal(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let (q, rem) = self.denom().div_rem(self.numer());
        let q = if rem.is_zero() { q } else { q + 1 };
        q.to_u64()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Accepts `n`, `n/d` and finite decimals such as `0.25`.
impl FromStr for Rational01 {
    type Err = RationalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = || RationalError::Malformed(text.to_string());
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        let value = if let Some((num, den)) = text.split_once('/') {
            if !digits(num) || !digits(den) {
                return Err(malformed());
            }
            let num: BigInt = num.parse().map_err(|_| malformed())?;
            let den: BigInt = den.parse().map_err(|_| malformed())?;
            if den.is_zero() {
                return Err(RationalError::ZeroDenominator(text.to_string()));
            }
            BigRational::new(num, den)
        } else if let Some((int, frac)) = text.split_once('.') {
            if !digits(int) || !digits(frac) {
                return Err(malformed());
            }
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let whole: BigInt = format!("{int}{frac}").parse().map_err(|_| malformed())?;
            BigRational::new(whole, scale)
        } else {
            if !digits(text) {
                return Err(malformed());
            }
            BigRational::from_integer(text.parse().map_err(|_| malformed())?)
        };
        Self::from_big(value).map_err(|_| RationalError::OutOfRange(text.to_string()))
    }
}

impl Serialize for Rational01 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational01 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("1/4".parse::<Rational01>().unwrap(), Rational01::frac(1, 4));
        assert_eq!("0.25".parse::<Rational01>().unwrap(), Rational01::frac(1, 4));
        assert_eq!("2/4".parse::<Rational01>().unwrap().to_string(), "1/2");
        assert_eq!("1".parse::<Rational01>().unwrap(), Rational01::one());
        assert_eq!("0".parse::<Rational01>().unwrap(), Rational01::zero());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!("5/4".parse::<Rational01>(), Err(RationalError::OutOfRange(_))));
        assert!(matches!("1.5".parse::<Rational01>(), Err(RationalError::OutOfRange(_))));
        assert!(matches!("1/0".parse::<Rational01>(), Err(RationalError::ZeroDenominator(_))));
        assert!(matches!("-1/2".parse::<Rational01>(), Err(RationalError::Malformed(_))));
        assert!(matches!("a/2".parse::<Rational01>(), Err(RationalError::Malformed(_))));
        assert!(matches!("".parse::<Rational01>(), Err(RationalError::Malformed(_))));
    }

    #[test]
    fn ceil_reciprocal_matches_definition() {
        assert_eq!(Rational01::frac(1, 3).ceil_reciprocal(), Some(3));
        assert_eq!(Rational01::frac(2, 3).ceil_reciprocal(), Some(2));
        assert_eq!(Rational01::one().ceil_reciprocal(), Some(1));
        assert_eq!(Rational01::zero().ceil_reciprocal(), None);
    }

    #[test]
    fn arithmetic_stays_exact() {
        let third = Rational01::frac(1, 3);
        assert_eq!(third.complement(), Rational01::frac(2, 3));
        assert_eq!(third.saturating_add(&Rational01::frac(5, 6)), Rational01::one());
        assert_eq!(third.checked_add(&Rational01::frac(5, 6)), None);
        assert_eq!(Rational01::frac(1, 2).minus_reciprocal(4), Some(Rational01::frac(1, 4)));
        assert_eq!(Rational01::frac(1, 2).minus_reciprocal(1), None);
    }
}
