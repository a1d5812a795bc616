//! Real intervals with dyadic endpoints `lo/2^p ≤ x ≤ hi/2^p` and outward rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

use super::finterval::FInterval;
use super::locate::Coord;
use super::qsqrt::{Qsqrt, Real2};
use crate::util::dyadic_to_f64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub prec: u32,
}

fn shr_floor(x: &BigInt, k: u32) -> BigInt {
    x.div_floor(&(BigInt::from(1) << k))
}

fn shr_ceil(x: &BigInt, k: u32) -> BigInt {
    x.div_ceil(&(BigInt::from(1) << k))
}

impl DyInterval {
    pub fn new(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        DyInterval { lo, hi, prec }
    }

    pub fn point(m: BigInt, prec: u32) -> Self {
        DyInterval {
            lo: m.clone(),
            hi: m,
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(BigInt::zero(), prec)
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        Self::point(n << prec, prec)
    }

    pub fn from_rat(r: &BigRational, prec: u32) -> Self {
        let num = r.numer() << prec;
        DyInterval {
            lo: num.div_floor(r.denom()),
            hi: num.div_ceil(r.denom()),
            prec,
        }
    }

    /// `[center − rad, center + rad]` for mantissas at this precision.
    pub fn around(center: &BigInt, rad: &BigInt, prec: u32) -> Self {
        DyInterval {
            lo: center - rad,
            hi: center + rad,
            prec,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.prec, o.prec);
        DyInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        DyInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Self {
        DyInterval {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = p.iter().min().expect("four products");
        let hi = p.iter().max().expect("four products");
        DyInterval {
            lo: shr_floor(lo, self.prec),
            hi: shr_ceil(hi, self.prec),
            prec: self.prec,
        }
    }

    pub fn square(&self) -> Self {
        let m = self.mul(self);
        if self.lo.is_negative() && self.hi.is_positive() {
            DyInterval {
                lo: BigInt::zero(),
                hi: m.hi,
                prec: self.prec,
            }
        } else {
            m
        }
    }

    pub fn scale_rat(&self, r: &BigRational) -> Self {
        let (a, b) = (self.lo.clone() * r.numer(), self.hi.clone() * r.numer());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        DyInterval {
            lo: lo.div_floor(r.denom()),
            hi: hi.div_ceil(r.denom()),
            prec: self.prec,
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Reciprocal of an interval not containing zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        let one = BigInt::from(1) << (2 * self.prec);
        // 1/x is decreasing on each sign branch
        Some(DyInterval {
            lo: one.div_floor(&self.hi),
            hi: one.div_ceil(&self.lo),
            prec: self.prec,
        })
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.recip()?))
    }

    /// Square root of the nonnegative part.
    pub fn sqrt(&self) -> Self {
        let lo = if self.lo.is_positive() {
            (&self.lo << self.prec).sqrt()
        } else {
            BigInt::zero()
        };
        let hi_sq = if self.hi.is_positive() {
            &self.hi << self.prec
        } else {
            BigInt::zero()
        };
        let mut hi = hi_sq.sqrt();
        if &hi * &hi < hi_sq {
            hi += 1;
        }
        DyInterval {
            lo,
            hi,
            prec: self.prec,
        }
    }

    pub fn mid(&self) -> BigInt {
        (&self.lo + &self.hi).div_floor(&BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        dyadic_to_f64(&self.mid(), self.prec)
    }

    pub fn width_mantissa(&self) -> BigInt {
        &self.hi - &self.lo
    }

    /// An `f64` interval containing this one.
    pub fn to_finterval(&self) -> FInterval {
        let lo = dyadic_to_f64(&self.lo, self.prec);
        let hi = dyadic_to_f64(&self.hi, self.prec);
        if !lo.is_finite() || !hi.is_finite() {
            return FInterval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            };
        }
        // below this scale the power-of-two rescaling may round subnormally
        let (lo, hi) = if lo.abs() < 1e-290 || hi.abs() < 1e-290 {
            (lo - 1e-300, hi + 1e-300)
        } else {
            (lo, hi)
        };
        FInterval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    /// Encloses `a + b√N`.
    pub fn enclose_qsqrt(q: &Qsqrt, prec: u32) -> Self {
        let a = DyInterval::from_rat(&q.a, prec);
        if q.b.is_zero() {
            return a;
        }
        let r = DyInterval::from_int(&q.n, prec).sqrt();
        a.add(&r.scale_rat(&q.b))
    }

    /// Encloses `A + B√w`.
    pub fn enclose_real2(x: &Real2, prec: u32) -> Self {
        let a = DyInterval::enclose_qsqrt(&x.a, prec);
        if x.b.is_zero() {
            return a;
        }
        let th = DyInterval::enclose_qsqrt(&x.w, prec).sqrt();
        a.add(&th.mul(&DyInterval::enclose_qsqrt(&x.b, prec)))
    }
}

impl Coord for DyInterval {
    fn add(&self, o: &Self) -> Self {
        DyInterval::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        DyInterval::mul(self, o)
    }
    fn scale(&self, r: &BigRational) -> Self {
        self.scale_rat(r)
    }
    fn add_rat(&self, r: &BigRational) -> Self {
        self.add(&DyInterval::from_rat(r, self.prec))
    }
    fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rat;

    #[test]
    fn third_times_three_contains_one() {
        let x = DyInterval::from_rat(&rat(1, 3), 64);
        let y = x.scale_rat(&rat(3, 1));
        let one = BigInt::from(1) << 64;
        assert!(y.lo <= one && one <= y.hi);
    }

    #[test]
    fn sqrt_encloses() {
        let two = DyInterval::from_int(&2.into(), 100);
        let s = two.sqrt();
        let sq = s.mul(&s);
        let t = BigInt::from(2) << 100;
        assert!(sq.lo <= t && t <= sq.hi);
        assert!(s.width_mantissa() <= 2.into());
    }

    #[test]
    fn reciprocal_encloses() {
        let x = DyInterval::new(BigInt::from(3) << 60, (BigInt::from(3) << 60) + 5, 60);
        let r = x.recip().unwrap();
        let prod = x.mul(&r);
        let one = BigInt::from(1) << 60;
        assert!(prod.lo <= one && one <= prod.hi);
    }
}
