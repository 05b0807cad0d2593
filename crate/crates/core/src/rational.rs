//! Exact rational inputs.
//!
//! Parameters `a` and `x` travel through the crate as [`Rational`] values so that every
//! lattice-membership decision reduces to an integer inequality.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"p/q"` or `"p"` (optional leading sign). Decimal points and exponents are rejected.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let err = |reason| Error::Parse { input: input.to_string(), reason };
    if s.is_empty() {
        return Err(err("empty string"));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let int = |part: &str| -> Result<BigInt> {
        let digits = part.strip_prefix(['+', '-']).unwrap_or(part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("expected an integer or p/q with integer p, q"));
        }
        part.parse::<BigInt>().map_err(|_| err("malformed integer"))
    };
    let n = int(num)?;
    let d = int(den)?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Like [`parse_rational`] but additionally requires a strictly positive value.
pub fn parse_positive(input: &str, what: &'static str) -> Result<Rational> {
    let r = parse_rational(input)?;
    if !r.is_positive() {
        return Err(Error::NonPositive { what });
    }
    Ok(r)
}

/// Canonical `p/q` (or `p` when q = 1) string.
pub fn to_exact_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// ⌊r⌋ as a big integer.
pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// ⌊r⌋ for r ≥ 0, if it fits in a `u64`.
pub fn floor_u64(r: &Rational) -> Option<u64> {
    if r.is_negative() {
        return None;
    }
    floor(r).to_u64()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The exact binary value of a finite `f64`.
pub fn from_f64_exact(v: f64) -> Result<Rational> {
    Rational::from_float(v).ok_or_else(|| Error::Domain(format!("{v} is not finite")))
}

/// The integer square root ⌊√t⌋ of a nonnegative rational.
///
/// Uses ⌊√t⌋ = ⌊√⌊t⌋⌋ and then confirms k² ≤ t < (k+1)² with rational comparisons.
pub fn isqrt_rational_floor(t: &Rational) -> Result<BigUint> {
    if t.is_negative() {
        return Err(Error::Domain("square root of a negative rational".into()));
    }
    let fl = floor(t).to_biguint().expect("nonnegative");
    let mut k = fl.sqrt();
    let sq = |k: &BigUint| Rational::from_integer(BigInt::from_biguint(Sign::Plus, k * k));
    while sq(&k) > *t {
        k -= 1u32;
    }
    while sq(&(&k + 1u32)) <= *t {
        k += 1u32;
    }
    Ok(k)
}

/// Splits a positive rational into (numerator, denominator) as `u128`, if both fit.
pub(crate) fn parts_u128(r: &Rational) -> Option<(u128, u128)> {
    Some((r.numer().to_u128()?, r.denom().to_u128()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), q(-3, 4));
        assert_eq!(parse_rational(" 15000 ").unwrap(), q(15000, 1));
    }

    #[test]
    fn rejects_decimals_and_garbage() {
        for bad in ["0.5", "1e3", "", "1/0", "a/2", "1/-", "1//2"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert!(matches!(parse_positive("0", "a"), Err(Error::NonPositive { .. })));
        assert!(parse_positive("-1/2", "x").is_err());
    }

    #[test]
    fn isqrt_of_rationals() {
        assert_eq!(isqrt_rational_floor(&q(0, 1)).unwrap(), BigUint::from(0u32));
        assert_eq!(isqrt_rational_floor(&q(8, 1)).unwrap(), BigUint::from(2u32));
        assert_eq!(isqrt_rational_floor(&q(9999, 100)).unwrap(), BigUint::from(9u32));
        assert_eq!(isqrt_rational_floor(&q(100, 1)).unwrap(), BigUint::from(10u32));
        assert_eq!(isqrt_rational_floor(&q(1, 4)).unwrap(), BigUint::from(0u32));
        assert!(isqrt_rational_floor(&q(-1, 4)).is_err());
    }

    #[test]
    fn exact_string_roundtrip() {
        for s in ["1", "1/4", "-7/3", "100000"] {
            assert_eq!(to_exact_string(&parse_rational(s).unwrap()), s);
        }
    }
}
