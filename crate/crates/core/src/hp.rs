//! High-precision real arithmetic on top of `astro-float`.
//!
//! [`Hp`] bundles the working precision with the constant cache that `astro-float`
//! needs for π, logarithms and exponentials. Every quantity that is later compared
//! against a bound (volumes, discrepancies, theorem terms, series certificates) is
//! evaluated through it.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;

use crate::rational::Rational;

pub type Real = BigFloat;

const RM: RoundingMode = RoundingMode::ToEven;

/// Default number of significant decimal digits.
pub const DEFAULT_DIGITS: usize = 50;

/// Minimum accepted precision, in decimal digits.
pub const MIN_DIGITS: usize = 15;

pub struct Hp {
    digits: usize,
    bits: usize,
    cc: Consts,
}

impl Hp {
    /// A context carrying `digits` significant decimal digits (plus guard bits).
    pub fn new(digits: usize) -> Self {
        let digits = digits.max(MIN_DIGITS);
        // log2(10) < 3.33; 64 guard bits absorb accumulated rounding.
        let bits = (digits * 333).div_ceil(100) + 64;
        Self { digits, bits, cc: Consts::new().expect("constant cache allocation") }
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn pi(&mut self) -> Real {
        self.cc.pi(self.bits, RM)
    }

    pub fn int(&self, v: i64) -> Real {
        BigFloat::from_i64(v, self.bits)
    }

    pub fn from_f64(&self, v: f64) -> Real {
        BigFloat::from_f64(v, self.bits)
    }

    pub fn big_int(&mut self, v: &BigInt) -> Real {
        BigFloat::parse(&v.to_string(), Radix::Dec, self.bits, RM, &mut self.cc)
    }

    pub fn rational(&mut self, r: &Rational) -> Real {
        let n = self.big_int(r.numer());
        let d = self.big_int(r.denom());
        self.div(&n, &d)
    }

    /// Parses a decimal literal such as `"4.4"` or `"0.3852"`.
    pub fn decimal(&mut self, s: &str) -> Real {
        BigFloat::parse(s, Radix::Dec, self.bits, RM, &mut self.cc)
    }

    pub fn add(&self, a: &Real, b: &Real) -> Real {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &Real, b: &Real) -> Real {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &Real, b: &Real) -> Real {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &Real, b: &Real) -> Real {
        a.div(b, self.bits, RM)
    }

    pub fn sqrt(&self, a: &Real) -> Real {
        a.sqrt(self.bits, RM)
    }

    pub fn ln(&mut self, a: &Real) -> Real {
        a.ln(self.bits, RM, &mut self.cc)
    }

    pub fn exp(&mut self, a: &Real) -> Real {
        a.exp(self.bits, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &Real) -> Real {
        a.sin(self.bits, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &Real) -> Real {
        a.cos(self.bits, RM, &mut self.cc)
    }

    /// `base^(num/den)` for positive `base`.
    pub fn pow_ratio(&mut self, base: &Real, num: i64, den: i64) -> Real {
        let e = self.div(&self.int(num), &self.int(den));
        self.pow(base, &e)
    }

    /// `base^e`. Evaluated without the correct-rounding retry loop, which never settles
    /// when the result is exactly representable (`4^{1/2}`); the guard bits cover the
    /// last-place error instead.
    pub fn pow(&mut self, base: &Real, e: &Real) -> Real {
        base.pow(e, self.bits, RoundingMode::None, &mut self.cc)
    }

    pub fn to_f64(&mut self, a: &Real) -> f64 {
        if a.is_zero() {
            return 0.0;
        }
        self.format_digits(a, 20).parse().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with the context's number of significant digits.
    pub fn format(&mut self, a: &Real) -> String {
        self.format_digits(a, self.digits)
    }

    /// Decimal rendering rounded (half away from zero) to `sig` significant digits.
    ///
    /// Positional notation for moderate exponents, `d.ddd…e±k` otherwise. Trailing zeros
    /// in the fraction are dropped.
    pub fn format_digits(&mut self, a: &Real, sig: usize) -> String {
        if a.is_nan() {
            return "NaN".into();
        }
        if a.is_inf() {
            return if a.is_negative() { "-inf".into() } else { "inf".into() };
        }
        if a.is_zero() {
            return "0".into();
        }
        let Ok((sign, raw, exp)) = a.convert_to_radix(Radix::Dec, RM, &mut self.cc) else {
            return "NaN".into();
        };
        let (digits, exp) = round_digits(&raw, exp as i64, sig.max(1));
        let mut out = String::new();
        if sign.is_negative() {
            out.push('-');
        }
        // value = 0.d1 d2 … × 10^exp
        if (-5..=21).contains(&exp) {
            if exp <= 0 {
                out.push_str("0.");
                out.extend(std::iter::repeat_n('0', (-exp) as usize));
                out.push_str(&digits);
            } else {
                let e = exp as usize;
                if digits.len() <= e {
                    out.push_str(&digits);
                    out.extend(std::iter::repeat_n('0', e - digits.len()));
                } else {
                    out.push_str(&digits[..e]);
                    out.push('.');
                    out.push_str(&digits[e..]);
                }
            }
        } else {
            out.push_str(&digits[..1]);
            if digits.len() > 1 {
                out.push('.');
                out.push_str(&digits[1..]);
            }
            out.push_str(&format!("e{}", exp - 1));
        }
        out
    }
}

/// Rounds the digit string `0.raw × 10^exp` to `sig` digits; returns the digits with
/// trailing zeros stripped and the (possibly bumped) exponent.
fn round_digits(raw: &[u8], exp: i64, sig: usize) -> (String, i64) {
    let mut d: Vec<u8> = raw.iter().take(sig).copied().collect();
    let mut exp = exp;
    if raw.len() > sig && raw[sig] >= 5 {
        let mut i = d.len();
        loop {
            if i == 0 {
                d.insert(0, 1);
                d.truncate(sig);
                exp += 1;
                break;
            }
            i -= 1;
            if d[i] == 9 {
                d[i] = 0;
            } else {
                d[i] += 1;
                break;
            }
        }
    }
    while d.len() > 1 && d.last() == Some(&0) {
        d.pop();
    }
    (d.iter().map(|&x| (b'0' + x) as char).collect(), exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_pi_to_requested_digits() {
        let mut hp = Hp::new(30);
        let pi = hp.pi();
        assert_eq!(hp.format_digits(&pi, 10), "3.141592654");
        assert_eq!(hp.format(&pi), "3.14159265358979323846264338328");
    }

    #[test]
    fn formatting_regimes() {
        let mut hp = Hp::new(20);
        assert_eq!(hp.format(&hp.int(7)), "7");
        assert_eq!(hp.format(&hp.int(-15000)), "-15000");
        let v = hp.decimal("0.00125");
        assert_eq!(hp.format(&v), "0.00125");
        assert_eq!(hp.format_digits(&hp.from_f64(0.999_999_9), 3), "1");
        assert_eq!(hp.format_digits(&hp.from_f64(1.5e30), 5), "1.5e30");
        assert_eq!(hp.format_digits(&hp.from_f64(2.5e-9), 5), "2.5e-9");
        let zero = hp.int(0);
        assert_eq!(hp.format(&zero), "0");
    }

    #[test]
    fn rational_and_decimal_inputs() {
        let mut hp = Hp::new(40);
        let r = hp.rational(&Rational::new(1.into(), 3.into()));
        assert!((hp.to_f64(&r) - 1.0 / 3.0).abs() < 1e-16);
        let d = hp.decimal("0.3852");
        assert_eq!(hp.format(&d), "0.3852");
        let half = hp.pow_ratio(&hp.int(4), 1, 2);
        assert_eq!(hp.format(&half), "2");
    }
}
