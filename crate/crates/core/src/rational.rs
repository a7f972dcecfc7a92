//! Exact arbitrary-precision rationals.
//!
//! Every certified quantity in this crate is a [`Rational`]. The type wraps
//! `num_rational::BigRational`, which keeps values in lowest terms with a
//! positive denominator, and adds the serialized form used by all
//! certificates: the string `"p/q"` (always with the denominator, `"0/1"`
//! for zero).

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    /// 2^exp for any (possibly negative) exponent.
    pub fn pow2(exp: i64) -> Self {
        let mag = BigInt::one() << exp.unsigned_abs() as usize;
        if exp >= 0 {
            Rational(BigRational::from_integer(mag))
        } else {
            Rational(BigRational::new(BigInt::one(), mag))
        }
    }

    /// Exact integer power.
    pub fn pow(&self, exp: u32) -> Self {
        Rational(self.0.pow(exp as i32))
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

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// True for 1/n with n >= 1 (numerator exactly one).
    pub fn is_unit_fraction(&self) -> bool {
        self.0.numer().is_one()
    }

    /// For a value p/2^e in lowest terms, returns e; `None` when the
    /// denominator has an odd factor.
    pub fn dyadic_exponent(&self) -> Option<u64> {
        let denom = self.0.denom();
        let bits = denom.bits();
        if denom == &(BigInt::one() << (bits - 1) as usize) {
            Some(bits - 1)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("reciprocal of zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Smallest n >= 1 with 1/n <= self, i.e. ceil(1/self). Requires a
    /// strictly positive value.
    pub fn ceil_recip(&self) -> Result<BigInt> {
        if self.0 <= BigRational::zero() {
            return Err(Error::InvalidArgument(
                "ceil_recip requires a positive value".into(),
            ));
        }
        Ok(self.0.recip().ceil().to_integer())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Approximate value for diagnostics and rendering heuristics only;
    /// never used on a certified path.
    pub fn to_f64_lossy(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"p/q"`, plain integers, and exact decimals such as
    /// `"0.125"`. Decimals convert exactly (base-10 digits over a power of
    /// ten); anything else is rejected rather than rounded.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty rational".into()));
        }
        if let Some((num, den)) = s.split_once('/') {
            let numer = BigInt::from_str(num.trim())
                .map_err(|e| Error::Parse(format!("bad numerator {num:?}: {e}")))?;
            let denom = BigInt::from_str(den.trim())
                .map_err(|e| Error::Parse(format!("bad denominator {den:?}: {e}")))?;
            return Rational::new(numer, denom);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad decimal {s:?}")));
            }
            let negative = int_part.starts_with('-');
            let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
                "0"
            } else {
                int_part
            };
            let whole = BigInt::from_str(int_digits)
                .map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?;
            let frac = BigInt::from_str(frac_part)
                .map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            let magnitude = whole.abs() * &scale + frac;
            let signed = if negative { -magnitude } else { magnitude };
            return Rational::new(signed, scale);
        }
        let numer =
            BigInt::from_str(s).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))?;
        Ok(Rational::from_int(numer))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::from_int(value)
    }
}

impl From<u64> for Rational {
    fn from(value: u64) -> Self {
        Rational::from_int(BigInt::from(value))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Shorthand used throughout the tests: `rat("3/8")`.
pub fn rat(s: &str) -> Rational {
    s.parse().expect("literal rational")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        assert_eq!(rat("3/6").to_string(), "1/2");
        assert_eq!(rat("-4/8").to_string(), "-1/2");
        assert_eq!(rat("7").to_string(), "7/1");
        assert_eq!(rat("0/5").to_string(), "0/1");
        assert_eq!(rat("0.125").to_string(), "1/8");
        assert_eq!(rat("-0.25").to_string(), "-1/4");
        assert_eq!(rat("1.5").to_string(), "3/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
        assert!("1.2.3".parse::<Rational>().is_err());
        assert!("1.".parse::<Rational>().is_err());
    }

    #[test]
    fn pow2_and_dyadic_exponent() {
        assert_eq!(Rational::pow2(-3), rat("1/8"));
        assert_eq!(Rational::pow2(4), rat("16"));
        assert_eq!(rat("5/8").dyadic_exponent(), Some(3));
        assert_eq!(rat("3/1").dyadic_exponent(), Some(0));
        assert_eq!(rat("1/6").dyadic_exponent(), None);
    }

    #[test]
    fn ceil_recip_picks_largest_unit_fraction() {
        // Largest 1/n <= 2/25 is 1/13.
        assert_eq!(rat("2/25").ceil_recip().unwrap(), BigInt::from(13));
        assert_eq!(rat("1/7").ceil_recip().unwrap(), BigInt::from(7));
        assert!(Rational::zero().ceil_recip().is_err());
    }

    #[test]
    fn serde_uses_p_over_q_strings() {
        let v = rat("22/7");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "\"22/7\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
