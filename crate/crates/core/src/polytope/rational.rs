//! Exact rationals and their JSON text forms.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

/// Denominator used when rounding decimals and irrational targets.
pub const DECIMAL_DENOMINATOR: i64 = 1_000_000;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest multiple of `1/den` (ties away from zero).
pub fn round_to(q: &Rational, den: i64) -> Rational {
    let scaled = q * int(den);
    let n = scaled.round();
    n / int(den)
}

/// Rounds a finite float to the nearest `k / 10^6`.
pub fn from_f64_rounded(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let k = (x * DECIMAL_DENOMINATOR as f64).round();
    Some(Rational::new(BigInt::from(k as i64), BigInt::from(DECIMAL_DENOMINATOR)))
}

pub fn to_f64(q: &Rational) -> f64 {
    // ratio of the two f64 conversions is fine at the magnitudes used here
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

/// `"num/den"`, or `"num"` for integers.
pub fn format(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"num/den"` exactly, or a decimal such as `"0.125"` / `"-1e-3"`.
/// Decimals whose exact denominator exceeds 10^6 are rounded to it.
pub fn parse(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| format!("bad numerator in `{t}`: {e}"))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| format!("bad denominator in `{t}`: {e}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{t}`"));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Result<Rational, String> {
    let err = || format!("not a rational or decimal: `{t}`");
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
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
    let mut value =
        Rational::from_integer(BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?);
    let shift = exp - frac_part.len() as i32;
    let ten = int(10);
    for _ in 0..shift.unsigned_abs() {
        if shift > 0 {
            value *= &ten;
        } else {
            value /= &ten;
        }
    }
    if neg {
        value = -value;
    }
    Ok(limit_denominator(value))
}

fn limit_denominator(q: Rational) -> Rational {
    let big = BigInt::from(DECIMAL_DENOMINATOR);
    if big.is_multiple_of(q.denom()) {
        q
    } else {
        round_to(&q, DECIMAL_DENOMINATOR)
    }
}

pub fn max<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    values.into_iter().max().cloned()
}

pub fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}

/// Serde adapter: written as `"num/den"`, read from such strings, decimal
/// strings, or JSON numbers (rounded to denominator 10^6).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalText(pub Rational);

impl Serialize for RationalText {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        let q = match Raw::deserialize(deserializer)? {
            Raw::Text(s) => parse(&s).map_err(serde::de::Error::custom)?,
            Raw::Int(n) => int(n),
            Raw::Float(x) => from_f64_rounded(x).ok_or_else(|| serde::de::Error::custom("non-finite number"))?,
        };
        Ok(RationalText(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse(" -2/4 ").unwrap(), ratio(-1, 2));
        assert_eq!(parse("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse("1").unwrap(), int(1));
        assert_eq!(parse("2.5e-1").unwrap(), ratio(1, 4));
        assert_eq!(parse("0.1234567").unwrap(), ratio(123457, 1_000_000));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse(".").is_err());
    }

    #[test]
    fn float_rounding() {
        let q = from_f64_rounded(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert_eq!(q, ratio(707107, 1_000_000));
        assert_eq!(from_f64_rounded(0.1).unwrap(), ratio(1, 10));
        assert!(from_f64_rounded(f64::NAN).is_none());
    }

    #[test]
    fn text_round_trip() {
        let q = ratio(-7, 3);
        assert_eq!(format(&q), "-7/3");
        let back: RationalText =
            serde_json::from_str(&serde_json::to_string(&RationalText(q.clone())).unwrap()).unwrap();
        assert_eq!(back.0, q);
        let n: RationalText = serde_json::from_str("0.25").unwrap();
        assert_eq!(n.0, ratio(1, 4));
        let i: RationalText = serde_json::from_str("1").unwrap();
        assert_eq!(i.0, int(1));
    }
}
