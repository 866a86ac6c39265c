//! Exact rational helpers shared by every module.
//!
//! All distances and scale parameters are kept as [`BigRational`] so that
//! comparisons such as `d < r^k` are decided exactly.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::Error;

pub type Rational = BigRational;

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` for any integer exponent; `base` must be nonzero when `exp < 0`.
pub fn pow(base: &Rational, exp: i32) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.125` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Canonical `p/q` (or `p` for integers) rendering used in every file format.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled integer for huge numerators/denominators.
        let n = value.numer().to_f64().unwrap_or(f64::NAN);
        let d = value.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Largest integer `m` with `m <= value`.
pub fn floor(value: &Rational) -> BigInt {
    value.floor().to_integer()
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Display adapter producing [`format_rational`] output.
pub struct Display<'a>(pub &'a Rational);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

/// Serde adapter: rationals travel as `"p/q"` strings.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("1/6").unwrap(), ratio(1, 6));
        assert_eq!(parse_rational("0.4").unwrap(), ratio(2, 5));
        assert_eq!(parse_rational("-1.25").unwrap(), ratio(-5, 4));
        assert_eq!(parse_rational("3").unwrap(), integer(3));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" 2/4 ").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for text in ["", "1/0", "abc", "1.2.3", "1e3", "-", "."] {
            assert!(parse_rational(text).is_err(), "{text}");
        }
    }

    #[test]
    fn negative_powers_invert() {
        assert_eq!(pow(&ratio(1, 9), -2), integer(81));
        assert_eq!(pow(&ratio(1, 9), 2), ratio(1, 81));
        assert_eq!(pow(&ratio(2, 3), 0), integer(1));
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&integer(-7)), "-7");
    }
}
