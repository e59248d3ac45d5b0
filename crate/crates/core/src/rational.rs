//! Exact rational scalars.
//!
//! Every coordinate, length and measure in the crate is an [`ExactRational`].
//! `num_rational::BigRational` keeps values in lowest terms with a positive
//! denominator, which is exactly the invariant we need.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type ExactRational = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn zero() -> ExactRational {
    BigRational::zero()
}

pub fn one() -> ExactRational {
    BigRational::one()
}

/// `2^-e` exactly.
pub fn dyadic(k: u64, e: u32) -> ExactRational {
    BigRational::new(BigInt::from(k), BigInt::one() << e)
}

/// Parses `"p/q"`, `"-p/q"` or an integer. Decimal and exponent notation is
/// rejected so that no floating literal can enter a measure.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::validation("empty fraction"));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let parse = |part: &str| -> Result<BigInt> {
        let digits = part.strip_prefix(['-', '+']).unwrap_or(part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::validation(format!("'{s}' is not an exact fraction")));
        }
        part.parse::<BigInt>()
            .map_err(|_| Error::validation(format!("'{s}' is not an exact fraction")))
    };
    let n = parse(num)?;
    let d = parse(den)?;
    if d.is_zero() {
        return Err(Error::validation(format!("'{s}' has a zero denominator")));
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(x: &ExactRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &ExactRational) -> ExactRational {
    x - x.floor()
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_integer(x: &ExactRational) -> ExactRational {
    let f = frac(x);
    let g = one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// Correctly rounded conversion (num-rational rounds to nearest).
pub fn to_f64(x: &ExactRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

pub fn in_unit_interval(x: &ExactRational) -> bool {
    !x.is_negative() && x < &one()
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &ExactRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExactRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<ExactRational>`.
pub mod serde_str_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[ExactRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_rational(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ExactRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_rational("13/21").unwrap(), ratio(13, 21));
        assert_eq!(parse_rational(" 2/4 ").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("-1/3").unwrap(), ratio(-1, 3));
    }

    #[test]
    fn rejects_floats_and_zero_denominators() {
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/").is_err());
        assert!(parse_rational("a/2").is_err());
    }

    #[test]
    fn lowest_terms_and_format() {
        let x = parse_rational("6/-8").unwrap();
        assert_eq!(format_rational(&x), "-3/4");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn frac_and_distance() {
        assert_eq!(frac(&ratio(-1, 4)), ratio(3, 4));
        assert_eq!(dist_to_integer(&ratio(7, 4)), ratio(1, 4));
        assert_eq!(dist_to_integer(&ratio(1, 3)), ratio(1, 3));
    }
}
