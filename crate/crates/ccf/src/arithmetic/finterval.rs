//! Outward-rounded `f64` intervals, used as a fast filter in front of exact sign tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::cmp::Ordering;

use crate::util::{int_to_f64, rat_to_f64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FInterval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

const WHOLE: FInterval = FInterval {
    lo: f64::NEG_INFINITY,
    hi: f64::INFINITY,
};

impl FInterval {
    pub fn point(x: f64) -> Self {
        FInterval { lo: x, hi: x }
    }

    /// Encloses `x` when it is an exactly representable value.
    pub fn exact(x: f64) -> Self {
        Self::point(x)
    }

    pub fn from_int(n: &BigInt) -> Self {
        Self::widen(int_to_f64(n), 2)
    }

    pub fn from_rat(r: &BigRational) -> Self {
        Self::widen(rat_to_f64(r), 2)
    }

    fn widen(x: f64, ulps: u32) -> Self {
        if !x.is_finite() {
            return WHOLE;
        }
        let (mut lo, mut hi) = (x, x);
        for _ in 0..ulps {
            lo = down(lo);
            hi = up(hi);
        }
        FInterval { lo, hi }
    }

    fn norm(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            WHOLE
        } else {
            FInterval { lo, hi }
        }
    }

    pub fn add(self, o: Self) -> Self {
        Self::norm(down(self.lo + o.lo), up(self.hi + o.hi))
    }

    pub fn sub(self, o: Self) -> Self {
        Self::norm(down(self.lo - o.hi), up(self.hi - o.lo))
    }

    pub fn neg(self) -> Self {
        FInterval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn mul(self, o: Self) -> Self {
        let p = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        if p.iter().any(|x| x.is_nan()) {
            return WHOLE;
        }
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self::norm(down(lo), up(hi))
    }

    pub fn square(self) -> Self {
        let m = self.mul(self);
        if self.lo <= 0.0 && self.hi >= 0.0 {
            FInterval { lo: 0.0, hi: m.hi }
        } else {
            FInterval {
                lo: m.lo.max(0.0),
                hi: m.hi,
            }
        }
    }

    pub fn mul_f(self, c: f64) -> Self {
        self.mul(Self::point(c))
    }

    pub fn recip(self) -> Self {
        if self.lo <= 0.0 && self.hi >= 0.0 {
            return WHOLE;
        }
        Self::norm(down(1.0 / self.hi), up(1.0 / self.lo))
    }

    pub fn div(self, o: Self) -> Self {
        self.mul(o.recip())
    }

    /// Square root of the nonnegative part.
    pub fn sqrt(self) -> Self {
        if self.hi < 0.0 {
            return WHOLE;
        }
        let lo = if self.lo <= 0.0 { 0.0 } else { down(self.lo.sqrt()).max(0.0) };
        Self::norm(lo, up(self.hi.sqrt()))
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn sign(self) -> Option<Ordering> {
        if self.lo > 0.0 {
            Some(Ordering::Greater)
        } else if self.hi < 0.0 {
            Some(Ordering::Less)
        } else if self.lo == 0.0 && self.hi == 0.0 {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}
