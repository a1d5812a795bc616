//! Rigorous complex discs with dyadic fixed-point center and radius.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use super::interval::DyInterval;
use super::locate::{Coord, Locatable, Quadric};
use crate::error::{Error, Result};
use crate::rings::{KElem, Ring, RingElement};
use crate::util::dyadic_to_f64;

/// The closed disc `{(re + i·im)/2^p + ζ : |ζ| ≤ rad/2^p}`.
#[derive(Clone, PartialEq, Eq)]
pub struct BallComplex {
    re: BigInt,
    im: BigInt,
    rad: BigInt,
    prec: u32,
}

fn pow2(k: u32) -> BigInt {
    BigInt::from(1) << k
}

/// Ceiling of the square root of a nonnegative integer.
fn sqrt_ceil(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    if &r * &r < *n {
        r + 1
    } else {
        r
    }
}

/// `√D/2` for the ring, enclosed at `prec` bits.
pub(crate) fn half_sqrt_d(ring: Ring, prec: u32) -> DyInterval {
    let d = DyInterval::from_int(&BigInt::from(ring.d()), prec).sqrt();
    d.scale_rat(&BigRational::new(1.into(), 2.into()))
}

impl BallComplex {
    pub fn new(re: BigInt, im: BigInt, rad: BigInt, prec: u32) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        BallComplex { re, im, rad, prec }
    }

    pub fn zero(prec: u32) -> Self {
        BallComplex::new(BigInt::zero(), BigInt::zero(), BigInt::zero(), prec)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn center_mantissas(&self) -> (&BigInt, &BigInt) {
        (&self.re, &self.im)
    }

    pub fn radius_mantissa(&self) -> &BigInt {
        &self.rad
    }

    /// The smallest ball of this representation containing the box `x × y`.
    pub fn from_box(x: &DyInterval, y: &DyInterval) -> Self {
        debug_assert_eq!(x.prec, y.prec);
        let two = BigInt::from(2);
        let hx = (&x.hi - &x.lo).div_ceil(&two);
        let hy = (&y.hi - &y.lo).div_ceil(&two);
        let rad = sqrt_ceil(&(&hx * &hx + &hy * &hy)) + 1;
        BallComplex::new(x.mid(), y.mid(), rad, x.prec)
    }

    /// Ball around `x + iy` with radius `r`, all exact rationals, rounded outward.
    pub fn from_rationals(x: &BigRational, y: &BigRational, r: &BigRational, prec: u32) -> Self {
        let bx = DyInterval::from_rat(x, prec);
        let by = DyInterval::from_rat(y, prec);
        let mut b = BallComplex::from_box(&bx, &by);
        let rm = (r.numer() << prec).div_ceil(r.denom());
        b.rad += rm.max(BigInt::zero());
        b
    }

    pub fn from_kelem(k: &KElem, prec: u32) -> Self {
        let wp = prec + 8;
        let x = DyInterval::from_rat(&k.re(), wp);
        let y = half_sqrt_d(k.ring(), wp).scale_rat(&k.imag_coeff());
        BallComplex::from_box(&x, &y).with_precision(prec)
    }

    pub fn from_element(x: &RingElement, prec: u32) -> Self {
        BallComplex::from_kelem(&KElem::from(x), prec)
    }

    /// Re-expresses the ball at another precision, rounding outward when coarsening.
    pub fn with_precision(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = prec - self.prec;
                BallComplex::new(&self.re << s, &self.im << s, &self.rad << s, prec)
            }
            Ordering::Less => {
                let m = pow2(self.prec - prec);
                BallComplex::new(
                    self.re.div_floor(&m),
                    self.im.div_floor(&m),
                    self.rad.div_ceil(&m) + 2,
                    prec,
                )
            }
        }
    }

    fn align(&self, o: &Self) -> (Self, Self) {
        let p = self.prec.max(o.prec);
        (self.with_precision(p), o.with_precision(p))
    }

    pub fn re_interval(&self) -> DyInterval {
        DyInterval::around(&self.re, &self.rad, self.prec)
    }

    pub fn im_interval(&self) -> DyInterval {
        DyInterval::around(&self.im, &self.rad, self.prec)
    }

    pub fn center_f64(&self) -> (f64, f64) {
        (dyadic_to_f64(&self.re, self.prec), dyadic_to_f64(&self.im, self.prec))
    }

    pub fn radius_f64(&self) -> f64 {
        dyadic_to_f64(&self.rad, self.prec)
    }

    /// Mantissa upper bound for `|center|`.
    fn abs_center_ceil(&self) -> BigInt {
        sqrt_ceil(&(&self.re * &self.re + &self.im * &self.im))
    }

    /// Upper bound for `|z|` over the ball.
    pub fn abs_upper(&self) -> f64 {
        let m = &self.abs_center_ceil() + &self.rad;
        dyadic_to_f64(&m, self.prec)
    }

    /// Lower bound for `|z|` over the ball (0 if the ball meets the origin).
    pub fn abs_lower(&self) -> f64 {
        let l = (&self.re * &self.re + &self.im * &self.im).sqrt() - &self.rad;
        if l.is_positive() {
            dyadic_to_f64(&l, self.prec)
        } else {
            0.0
        }
    }

    pub fn contains_zero(&self) -> bool {
        let c2 = &self.re * &self.re + &self.im * &self.im;
        c2 <= &self.rad * &self.rad
    }

    /// Whether the exact point `x + iy` (rationals) lies in the ball.
    pub fn contains_rational(&self, x: &BigRational, y: &BigRational) -> bool {
        let s = BigRational::from_integer(pow2(self.prec));
        let dx = x * &s - BigRational::from_integer(self.re.clone());
        let dy = y * &s - BigRational::from_integer(self.im.clone());
        let r = BigRational::from_integer(self.rad.clone());
        &dx * &dx + &dy * &dy <= &r * &r
    }

    /// Whether every point of `o` lies in `self`.
    pub fn contains_ball(&self, o: &Self) -> bool {
        let (a, b) = self.align(o);
        if b.rad > a.rad {
            return false;
        }
        let dx = &a.re - &b.re;
        let dy = &a.im - &b.im;
        let slack = &a.rad - &b.rad;
        &dx * &dx + &dy * &dy <= &slack * &slack
    }

    /// Whether the two balls share a point.
    pub fn overlaps(&self, o: &Self) -> bool {
        let (a, b) = self.align(o);
        let dx = &a.re - &b.re;
        let dy = &a.im - &b.im;
        let s = &a.rad + &b.rad;
        &dx * &dx + &dy * &dy <= &s * &s
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        BallComplex::new(&a.re + &b.re, &a.im + &b.im, &a.rad + &b.rad, a.prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        BallComplex::new(-&self.re, -&self.im, self.rad.clone(), self.prec)
    }

    pub fn conj(&self) -> Self {
        BallComplex::new(self.re.clone(), -&self.im, self.rad.clone(), self.prec)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        let p = a.prec;
        let m = pow2(p);
        let re = (&a.re * &b.re - &a.im * &b.im).div_floor(&m);
        let im = (&a.re * &b.im + &a.im * &b.re).div_floor(&m);
        let la = a.abs_center_ceil();
        let lb = b.abs_center_ceil();
        let rad = (&la * &b.rad).div_ceil(&m)
            + (&lb * &a.rad).div_ceil(&m)
            + (&a.rad * &b.rad).div_ceil(&m)
            + 2;
        BallComplex::new(re, im, rad, p)
    }

    pub fn sub_element(&self, a: &RingElement) -> Self {
        self.sub(&BallComplex::from_element(a, self.prec))
    }

    pub fn mul_element(&self, a: &RingElement) -> Self {
        self.mul(&BallComplex::from_element(a, self.prec))
    }

    /// `{1/ζ : ζ ∈ self}` enclosed; fails when the ball meets zero.
    pub fn inv(&self) -> Result<Self> {
        let p = self.prec;
        let den = &self.re * &self.re + &self.im * &self.im;
        let l = den.sqrt();
        if l <= self.rad {
            return Err(Error::ContainsZero);
        }
        let m2 = pow2(2 * p);
        let re = (&self.re * &m2).div_floor(&den);
        let im = (-&self.im * &m2).div_floor(&den);
        // image of B(c, ρ) lies in B(1/c, ρ/(|c|(|c| − ρ)))
        let rad = (&self.rad * &m2).div_ceil(&(&l * (&l - &self.rad))) + 2;
        Ok(BallComplex::new(re, im, rad, p))
    }

    /// Enclosure of `|z|²` over the ball.
    pub fn abs2_interval(&self) -> DyInterval {
        self.re_interval().square().add(&self.im_interval().square())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("balls serialize")
    }
}

/// Formats `m · 2^-p` as a hexadecimal float such as `-0x1a2bp-64`.
pub fn hex_float(m: &BigInt, prec: u32) -> String {
    let sign = if m.sign() == Sign::Minus { "-" } else { "" };
    format!("{sign}0x{}p-{prec}", m.magnitude().to_str_radix(16))
}

/// Parses `±0x<hex>p±<exp>` into a mantissa scaled to `2^-prec`.
pub fn parse_hex_float(s: &str, prec: u32) -> Result<BigInt> {
    let bad = || Error::Parse(format!("not a hex float: {s:?}"));
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let body = body
        .strip_prefix("0x")
        .or_else(|| body.strip_prefix("0X"))
        .ok_or_else(bad)?;
    let (mant, exp) = body.split_once(['p', 'P']).ok_or_else(bad)?;
    let m = BigInt::parse_bytes(mant.as_bytes(), 16).ok_or_else(bad)?;
    let e: i64 = exp.parse().map_err(|_| bad())?;
    let shift = e + prec as i64;
    let v = if shift >= 0 {
        m << (shift as u64)
    } else {
        let d = pow2((-shift) as u32);
        if !(&m % &d).is_zero() {
            return Err(Error::Parse(format!("{s:?} is not representable at {prec} bits")));
        }
        m / d
    };
    Ok(if neg { -v } else { v })
}

#[derive(Serialize, Deserialize)]
struct BallRepr {
    re: String,
    im: String,
    rad: String,
    prec: u32,
}

impl Serialize for BallComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BallRepr {
            re: hex_float(&self.re, self.prec),
            im: hex_float(&self.im, self.prec),
            rad: hex_float(&self.rad, self.prec),
            prec: self.prec,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BallComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BallRepr::deserialize(d)?;
        let f = |s: &str| parse_hex_float(s, r.prec).map_err(serde::de::Error::custom);
        let rad = f(&r.rad)?;
        if rad.is_negative() {
            return Err(serde::de::Error::custom("negative radius"));
        }
        Ok(BallComplex::new(f(&r.re)?, f(&r.im)?, rad, r.prec))
    }
}

impl fmt::Debug for BallComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.center_f64();
        write!(f, "Ball({x:.17}{y:+.17}i ± {:.3e}, {} bits)", self.radius_f64(), self.prec)
    }
}

impl fmt::Display for BallComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.center_f64();
        write!(f, "{x}{y:+}i@{:.3e}", self.radius_f64())
    }
}

impl Locatable for BallComplex {
    fn approx(&self) -> (f64, f64) {
        self.center_f64()
    }

    fn quadric_sign(&self, q: &Quadric) -> Option<Ordering> {
        let p = self.prec;
        let x = self.re_interval();
        let y = self.im_interval();
        let b = q.b();
        let bx = DyInterval::from_rat(&b.re(), p);
        let by = half_sqrt_d(q.ring(), p).scale_rat(&b.imag_coeff());
        let lin = bx.mul(&x).add(&by.mul(&y)).scale_rat(&BigRational::from_integer(2.into()));
        let mut v = lin.add(&DyInterval::from_rat(q.c(), p));
        if !q.a().is_zero() {
            v = v.add(&x.square().add(&y.square()).scale_rat(q.a()));
        }
        v.sign()
    }

    fn precision_bits(&self) -> u32 {
        self.prec
    }

    fn approx_radius(&self) -> f64 {
        self.radius_f64()
    }
}

/// A point that can be enclosed at any requested precision.
pub trait BallSource: Send + Sync {
    fn at(&self, prec: u32) -> BallComplex;
    /// Whether higher precision yields tighter balls.
    fn refinable(&self) -> bool {
        true
    }
    fn describe(&self) -> String;
}

/// A ball given once and for all, e.g. from decimal input with an error radius.
#[derive(Clone, Debug)]
pub struct FixedBall(pub BallComplex);

impl BallSource for FixedBall {
    fn at(&self, prec: u32) -> BallComplex {
        self.0.with_precision(prec.max(self.0.prec))
    }
    fn refinable(&self) -> bool {
        false
    }
    fn describe(&self) -> String {
        format!("ball {}", self.0)
    }
}

/// Parses `x+yi@r` with decimal or rational parts, e.g. `1.0+1.732050808i@1e-9`.
pub fn parse_ball(s: &str, prec: u32) -> Result<BallComplex> {
    use crate::util::parse_rat;
    let (z, r) = s.split_once('@').unwrap_or((s, "0"));
    let z = z.trim().replace(' ', "");
    let r = parse_rat(r)?;
    if r.is_negative() {
        return Err(Error::Parse("negative radius".into()));
    }
    let (x, y) = if let Some(body) = z.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let im = &body[i..];
                let im = match im {
                    "+" => "1",
                    "-" => "-1",
                    other => other.strip_prefix('+').unwrap_or(other),
                };
                (parse_rat(&body[..i])?, parse_rat(im)?)
            }
            None => {
                let im = match body {
                    "" | "+" => "1",
                    "-" => "-1",
                    other => other,
                };
                (BigRational::zero(), parse_rat(im)?)
            }
        }
    } else {
        (parse_rat(&z)?, BigRational::zero())
    };
    Ok(BallComplex::from_rationals(&x, &y, &r, prec))
}

/// The point `x + iy` on the circle `|z|² = r2` with `x = √r2·(k/12)^{1/3}`, `y > 0`.
///
/// For `1 ≤ k ≤ 11` the abscissa is not in `Q(√r2)`, so the point lies outside every
/// imaginary quadratic field.
#[derive(Clone, Debug)]
pub struct CirclePoint {
    pub r2: BigRational,
    pub k: u32,
}

impl CirclePoint {
    pub fn new(r2: BigRational, k: u32) -> Result<Self> {
        if !r2.is_positive() || !(1..=11).contains(&k) {
            return Err(Error::ParameterOutOfRange(format!("circle point r2={r2}, k={k}")));
        }
        Ok(CirclePoint { r2, k })
    }

    /// `x⁶ = r2³·k²/144`.
    fn x6(&self) -> BigRational {
        let k = BigInt::from(self.k);
        self.r2.pow(3) * BigRational::new(&k * &k, 144.into())
    }
}

impl BallSource for CirclePoint {
    fn at(&self, prec: u32) -> BallComplex {
        let wp = prec + 16;
        let x6 = self.x6();
        let f = (x6.numer() << (6 * wp)).div_floor(x6.denom());
        let xm = f.nth_root(6);
        let x = DyInterval::new(xm.clone(), xm + 1, wp);
        let y2 = DyInterval::from_rat(&self.r2, wp).sub(&x.square());
        let y = y2.sqrt();
        BallComplex::from_box(&x, &y).with_precision(prec)
    }

    fn describe(&self) -> String {
        format!("circle point |z|^2={} k={}", crate::util::fmt_rat(&self.r2), self.k)
    }
}

/// Ten points on `|z|² = r2`, used to probe circles of badly approximable numbers.
pub fn circle_points(r2: &BigRational) -> Vec<CirclePoint> {
    (2..=11)
        .map(|k| CirclePoint::new(r2.clone(), k).expect("k in range"))
        .collect()
}

pub fn ball_inv(w: &BallComplex) -> Result<BallComplex> {
    w.inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rat;

    fn exact(x: i64, y: i64, prec: u32) -> BallComplex {
        BallComplex::new(BigInt::from(x) << prec, BigInt::from(y) << prec, 0.into(), prec)
    }

    #[test]
    fn inverse_of_two() {
        let b = exact(2, 0, 64).inv().unwrap();
        assert!(b.contains_rational(&rat(1, 2), &rat(0, 1)));
        assert!(b.radius_f64() < 1e-18);
    }

    #[test]
    fn inverse_of_i() {
        let b = exact(0, 1, 64).inv().unwrap();
        assert!(b.contains_rational(&rat(0, 1), &rat(-1, 1)));
    }

    #[test]
    fn inverse_of_fat_ball() {
        let w = BallComplex::from_rationals(&rat(2, 1), &rat(0, 1), &rat(1, 10), 80);
        let b = w.inv().unwrap();
        assert!(b.contains_rational(&rat(10, 19), &rat(0, 1)));
        assert!(b.contains_rational(&rat(10, 21), &rat(0, 1)));
        assert!(b.radius_f64() <= 0.1 / (1.9 * 1.9) + 1e-15);
    }

    #[test]
    fn zero_ball_rejected() {
        let w = BallComplex::from_rationals(&rat(1, 10), &rat(0, 1), &rat(1, 5), 64);
        assert_eq!(w.inv(), Err(Error::ContainsZero));
    }

    #[test]
    fn hex_round_trip() {
        let w = BallComplex::from_rationals(&rat(-7, 3), &rat(5, 11), &rat(1, 1000), 96);
        let s = serde_json::to_string(&w).unwrap();
        let back: BallComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert_eq!(parse_hex_float("0x1p-1", 4).unwrap(), BigInt::from(8));
    }

    #[test]
    fn circle_point_on_circle() {
        for p in circle_points(&rat(3, 1)) {
            let b = p.at(200);
            let n = b.abs2_interval();
            let three = BigInt::from(3) << 200;
            assert!(n.lo <= three && three <= n.hi, "{}", p.describe());
            assert!(b.radius_f64() < 1e-55);
        }
    }

    #[test]
    fn parse_decimal_ball() {
        let b = parse_ball("1.0+1.732050808i@1e-9", 64).unwrap();
        let (x, y) = b.center_f64();
        assert!((x - 1.0).abs() < 1e-15 && (y - 1.732050808).abs() < 1e-15);
        assert!(b.radius_f64() >= 1e-9);
        let c = parse_ball("-2i", 32).unwrap();
        assert_eq!(c.center_f64(), (0.0, -2.0));
    }

    #[test]
    fn quadric_sign_on_ball() {
        let q = Quadric::disc(&KElem::from_ints(Ring::Eisenstein, 0, 0, 1), rat(1, 1));
        let inside = BallComplex::from_rationals(&rat(1, 2), &rat(1, 2), &rat(1, 1000), 64);
        assert_eq!(inside.quadric_sign(&q), Some(Ordering::Less));
        let edge = BallComplex::from_rationals(&rat(1, 1), &rat(0, 1), &rat(1, 1000), 64);
        assert_eq!(edge.quadric_sign(&q), None);
    }
}
