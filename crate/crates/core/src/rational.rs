//! Exact rational helpers.
//!
//! Everything in the crate is computed over [`Rational`], an arbitrary
//! precision fraction kept in lowest terms with a positive denominator.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Builds `num / den`. Panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form: `"3"`, `"-1/2"`.
pub fn format(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    Malformed(String),
    ZeroDenominator(String),
    NotCanonical { text: String, canonical: String },
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRationalError::Malformed(s) => write!(f, "malformed rational {s:?}"),
            ParseRationalError::ZeroDenominator(s) => write!(f, "zero denominator in {s:?}"),
            ParseRationalError::NotCanonical { text, canonical } => {
                write!(f, "non-canonical rational {text:?} (expected {canonical:?})")
            }
        }
    }
}

impl std::error::Error for ParseRationalError {}

/// Parses a rational written as `p` or `p/q`, rejecting anything that is not
/// already in canonical form (lowest terms, positive denominator, no `+`,
/// no leading zeros, no `/1`).
pub fn parse_canonical(text: &str) -> Result<Rational, ParseRationalError> {
    let malformed = || ParseRationalError::Malformed(text.to_string());
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numer: BigInt = parse_int(n).ok_or_else(malformed)?;
    let denom: BigInt = match d {
        Some(d) if !d.starts_with('-') => parse_int(d).ok_or_else(malformed)?,
        Some(_) => return Err(malformed()),
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(text.to_string()));
    }
    let q = Rational::new(numer, denom);
    let canonical = format(&q);
    if canonical != text {
        return Err(ParseRationalError::NotCanonical {
            text: text.to_string(),
            canonical,
        });
    }
    Ok(q)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn floor(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// Fractional part in `[0, 1)`.
pub fn fract(q: &Rational) -> Rational {
    q - q.floor()
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn to_i64(q: &Rational) -> Option<i64> {
    if is_integer(q) {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

pub fn is_negative(q: &Rational) -> bool {
    q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_canonically() {
        assert_eq!(format(&int(3)), "3");
        assert_eq!(format(&ratio(-1, 2)), "-1/2");
        assert_eq!(format(&ratio(2, -4)), "-1/2");
        assert_eq!(format(&ratio(0, 5)), "0");
    }

    #[test]
    fn parses_canonical_and_rejects_the_rest() {
        assert_eq!(parse_canonical("-1/2").unwrap(), ratio(-1, 2));
        assert_eq!(parse_canonical("7").unwrap(), int(7));
        assert!(matches!(
            parse_canonical("2/4"),
            Err(ParseRationalError::NotCanonical { .. })
        ));
        assert!(matches!(
            parse_canonical("1/-2"),
            Err(ParseRationalError::Malformed(_))
        ));
        assert!(matches!(
            parse_canonical("3/1"),
            Err(ParseRationalError::NotCanonical { .. })
        ));
        assert!(matches!(
            parse_canonical("1/0"),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
        assert!(parse_canonical("+1").is_err());
        assert!(parse_canonical("007").is_err());
        assert!(parse_canonical("").is_err());
        assert!(parse_canonical("1.5").is_err());
    }

    #[test]
    fn floor_and_fract_of_negative() {
        let q = ratio(-3, 2);
        assert_eq!(floor(&q), BigInt::from(-2));
        assert_eq!(fract(&q), ratio(1, 2));
    }

    #[test]
    fn lcm_of_small_denominators() {
        let qs = [ratio(1, 3), ratio(1, 2), int(4)];
        assert_eq!(lcm_of_denominators(&qs), BigInt::from(6));
    }
}
