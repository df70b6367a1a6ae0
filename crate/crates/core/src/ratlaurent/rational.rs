//! Exact rationals and their string form.
//!
//! All scalars in this crate are `BigRational`s, which are kept in lowest
//! terms with a positive denominator. On the wire a rational is the string
//! `"p/q"`, or `"p"` when `q = 1`. Decimal and exponent literals are refused
//! so that nothing inexact slips in through I/O.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("floating-point literal `{0}` refused; write rationals as \"p/q\"")]
    FloatLiteral(String),
    #[error("malformed rational `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"p/q"` or `"p"` into a canonical rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Malformed(text.to_string()));
    }
    let lower = s.to_ascii_lowercase();
    if s.contains('.') || lower.contains('e') || lower.contains("inf") || lower.contains("nan") {
        return Err(ParseRationalError::FloatLiteral(text.to_string()));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| ParseRationalError::Malformed(text.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| ParseRationalError::Malformed(text.to_string()))?;
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(text.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Canonical string form: `"p/q"`, or `"p"` for integers.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn pow(base: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

pub fn floor(value: &Rational) -> BigInt {
    value.numer().div_floor(value.denom())
}

pub fn is_integer(value: &Rational) -> bool {
    value.denom().is_one()
}

/// Nearest binary64 approximation; big values saturate to ±inf.
pub fn to_f64(value: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (value.numer().to_f64(), value.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both parts down to a representable range.
    let bits = value.numer().bits().max(value.denom().bits()) as i64;
    let shift = (bits - 1000).max(0) as usize;
    let n = (value.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (value.denom() >> shift).to_f64().unwrap_or(0.0);
    if d == 0.0 {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

/// Exact rational value of a finite binary64.
pub fn from_f64(value: f64) -> Option<Rational> {
    BigRational::from_float(value)
}

/// The rational with the smallest denominator in the open interval `(lo, hi)`.
///
/// Continued-fraction descent (Stern–Brocot). Requires `lo < hi`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo < hi);
    if lo.is_negative() {
        if hi.is_positive() {
            return Rational::zero();
        }
        return -simplest_between(&-hi, &-lo);
    }
    let fl = BigRational::from_integer(floor(lo));
    let next = &fl + Rational::one();
    if &next < hi {
        return next;
    }
    // Every point of (lo, hi) is fl + 1/z with z in (1/(hi - fl), 1/(lo - fl)).
    let z_lo = (hi - &fl).recip();
    let z = if lo == &fl {
        BigRational::from_integer(floor(&z_lo) + BigInt::one())
    } else {
        simplest_between(&z_lo, &(lo - &fl).recip())
    };
    fl + z.recip()
}

/// Serde adapter: a `Rational` field as a `"p/q"` string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => s.serialize_some(&format_rational(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let text = Option::<String>::deserialize(d)?;
            text.map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&format_rational(v))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
