//! Small numeric helpers shared across modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{Error, Result};

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Floor square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(!n.is_negative());
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

pub fn sign_of(n: &BigInt) -> Ordering {
    n.cmp(&BigInt::zero())
}

pub fn rat_sign(r: &BigRational) -> Ordering {
    r.numer().cmp(&BigInt::zero()) // denominators are kept positive
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn int_to_f64(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(f64::NAN)
}

/// `m·2^{-prec}` as the nearest `f64` up to a relative error below one ulp.
pub fn dyadic_to_f64(m: &BigInt, prec: u32) -> f64 {
    let shift = m.bits().saturating_sub(64);
    let top = int_to_f64(&(m >> shift));
    let mut e = shift as i64 - prec as i64;
    let mut x = top;
    while e != 0 && x != 0.0 && x.is_finite() {
        let step = e.clamp(-1000, 1000);
        x *= 2f64.powi(step as i32);
        e -= step;
    }
    x
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `0.15` or `-1.5e-3` into an exact rational.
pub fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Integers in JSON: numbers when they fit in `i64`, strings otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntRepr {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for IntRepr {
    fn from(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(n.to_string()),
        }
    }
}

impl TryFrom<IntRepr> for BigInt {
    type Error = Error;
    fn try_from(r: IntRepr) -> Result<BigInt> {
        match r {
            IntRepr::Small(v) => Ok(BigInt::from(v)),
            IntRepr::Big(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        }
    }
}

pub fn lcm_all<'a>(it: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x))
}

pub fn gcd_all<'a>(it: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    it.into_iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadics_beyond_the_exponent_range() {
        let three = BigInt::from(3) << 9000u32;
        assert_eq!(dyadic_to_f64(&three, 9000), 3.0);
        assert_eq!(dyadic_to_f64(&-(BigInt::from(5) << 4000u32), 4001), -2.5);
        assert_eq!(dyadic_to_f64(&BigInt::from(1), 5000), 0.0);
        assert_eq!(dyadic_to_f64(&BigInt::from(7), 0), 7.0);
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rat("0.15").unwrap(), rat(3, 20));
        assert_eq!(parse_rat("5/4").unwrap(), rat(5, 4));
        assert_eq!(parse_rat("-1.5e-3").unwrap(), rat(-3, 2000));
        assert_eq!(parse_rat("1e-9").unwrap(), rat(1, 1_000_000_000));
        assert_eq!(parse_rat("7").unwrap(), rat(7, 1));
        assert!(parse_rat("x").is_err());
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn squares() {
        assert_eq!(is_square(&int(49)), Some(int(7)));
        assert_eq!(is_square(&int(50)), None);
        assert_eq!(is_square(&int(-4)), None);
    }
}
