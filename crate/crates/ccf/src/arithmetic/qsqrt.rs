//! Exact real arithmetic in the tower `Q ⊂ Q(√N) ⊂ Q(√N)(√w)`.
//!
//! Coordinates of a quadratic surd `x + y·√Δ` in the lattice basis `{1, g}` live in this
//! tower with `N = |Δ|²`, so every predicate that is polynomial in those coordinates has an
//! exactly decidable sign.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::arithmetic::DyInterval;
use crate::util::{rat_sign, rat_to_f64};

/// `a + b·√N` with rational `a`, `b` and a fixed nonnegative integer `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qsqrt {
    pub a: BigRational,
    pub b: BigRational,
    pub n: Arc<BigInt>,
}

fn sign_sum(sa: Ordering, sb: Ordering, cmp_sq: impl FnOnce() -> Ordering) -> Ordering {
    // sign of A + B·√R given sign A, sign B and sign(A² − B²R)
    use Ordering::*;
    match (sa, sb) {
        (Equal, s) | (s, Equal) => s,
        (x, y) if x == y => x,
        (sa, sb) => match cmp_sq() {
            Greater => sa,
            Less => sb,
            Equal => Equal,
        },
    }
}

impl Qsqrt {
    pub fn rational(a: BigRational, n: &Arc<BigInt>) -> Self {
        Qsqrt {
            a,
            b: BigRational::zero(),
            n: n.clone(),
        }
    }

    pub fn zero(n: &Arc<BigInt>) -> Self {
        Self::rational(BigRational::zero(), n)
    }

    pub fn one(n: &Arc<BigInt>) -> Self {
        Self::rational(BigRational::one(), n)
    }

    /// `√N` itself.
    pub fn root(n: &Arc<BigInt>) -> Self {
        Qsqrt {
            a: BigRational::zero(),
            b: BigRational::one(),
            n: n.clone(),
        }
    }

    fn nr(&self) -> BigRational {
        BigRational::from_integer((*self.n).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    pub fn add(&self, o: &Self) -> Self {
        Qsqrt {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            n: self.n.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Qsqrt {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
            n: self.n.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Qsqrt {
            a: -&self.a,
            b: -&self.b,
            n: self.n.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Qsqrt {
            a: &self.a * &o.a + &self.b * &o.b * self.nr(),
            b: &self.a * &o.b + &self.b * &o.a,
            n: self.n.clone(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Qsqrt {
            a: &self.a * r,
            b: &self.b * r,
            n: self.n.clone(),
        }
    }

    pub fn add_rat(&self, r: &BigRational) -> Self {
        Qsqrt {
            a: &self.a + r,
            b: self.b.clone(),
            n: self.n.clone(),
        }
    }

    /// Inverse by the conjugate `a − b√N`; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let den = &self.a * &self.a - &self.b * &self.b * self.nr();
        if den.is_zero() {
            // N is a perfect square and a = ±b√N, or the value is zero.
            let r = crate::util::is_square(&self.n)?;
            let v = &self.a + &self.b * BigRational::from_integer(r);
            if v.is_zero() {
                return None;
            }
            return Some(Self::rational(v.recip(), &self.n));
        }
        Some(Qsqrt {
            a: &self.a / &den,
            b: -&self.b / &den,
            n: self.n.clone(),
        })
    }

    pub fn sign(&self) -> Ordering {
        sign_sum(rat_sign(&self.a), rat_sign(&self.b), || {
            rat_sign(&(&self.a * &self.a - &self.b * &self.b * self.nr()))
        })
    }

    pub fn cmp_to(&self, o: &Self) -> Ordering {
        self.sub(o).sign()
    }

    pub fn to_f64(&self) -> f64 {
        let (a, b) = (rat_to_f64(&self.a), rat_to_f64(&self.b) * crate::util::int_to_f64(&self.n).sqrt());
        if (a + b).abs() > 1e-6 * (a.abs() + b.abs()) || self.b.is_zero() {
            return a + b;
        }
        refine(self.sign(), |prec| DyInterval::enclose_qsqrt(self, prec))
    }
}

/// `A + B·θ` with `A, B ∈ Q(√N)` and `θ = √w`, `w ∈ Q(√N)` positive.
#[derive(Clone, Debug)]
pub struct Real2 {
    pub a: Qsqrt,
    pub b: Qsqrt,
    pub w: Arc<Qsqrt>,
}

impl Real2 {
    pub fn from_q(a: Qsqrt, w: &Arc<Qsqrt>) -> Self {
        let b = Qsqrt::zero(&a.n);
        Real2 { a, b, w: w.clone() }
    }

    pub fn rational(r: BigRational, n: &Arc<BigInt>, w: &Arc<Qsqrt>) -> Self {
        Self::from_q(Qsqrt::rational(r, n), w)
    }

    pub fn add(&self, o: &Self) -> Self {
        Real2 {
            a: self.a.add(&o.a),
            b: self.b.add(&o.b),
            w: self.w.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Real2 {
            a: self.a.sub(&o.a),
            b: self.b.sub(&o.b),
            w: self.w.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Real2 {
            a: self.a.neg(),
            b: self.b.neg(),
            w: self.w.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Real2 {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.b).mul(&self.w)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.a)),
            w: self.w.clone(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Real2 {
            a: self.a.scale(r),
            b: self.b.scale(r),
            w: self.w.clone(),
        }
    }

    pub fn add_rat(&self, r: &BigRational) -> Self {
        Real2 {
            a: self.a.add_rat(r),
            b: self.b.clone(),
            w: self.w.clone(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        // (A + Bθ)^{-1} = (A − Bθ)/(A² − B²w)
        let den = self.a.mul(&self.a).sub(&self.b.mul(&self.b).mul(&self.w));
        let di = den.inv()?;
        Some(Real2 {
            a: self.a.mul(&di),
            b: self.b.neg().mul(&di),
            w: self.w.clone(),
        })
    }

    pub fn sign(&self) -> Ordering {
        sign_sum(self.a.sign(), self.b.sign(), || {
            self.a
                .mul(&self.a)
                .sub(&self.b.mul(&self.b).mul(&self.w))
                .sign()
        })
    }

    pub fn cmp_to(&self, o: &Self) -> Ordering {
        self.sub(o).sign()
    }

    pub fn to_f64(&self) -> f64 {
        let (a, b) = (self.a.to_f64(), self.b.to_f64() * self.w.to_f64().sqrt());
        if (a + b).abs() > 1e-6 * (a.abs() + b.abs()) || self.b.is_zero() {
            return a + b;
        }
        refine(self.sign(), |prec| DyInterval::enclose_real2(self, prec))
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
}

/// Evaluates a value with heavy cancellation by enclosing it at growing precision.
fn refine(sign: Ordering, enclose: impl Fn(u32) -> DyInterval) -> f64 {
    if sign == Ordering::Equal {
        return 0.0;
    }
    let mut prec = 128;
    loop {
        let iv = enclose(prec).to_finterval();
        let mid = iv.mid();
        if iv.sign().is_some() && iv.hi - iv.lo <= 1e-15 * mid.abs() || prec >= 1 << 16 {
            return mid;
        }
        prec *= 2;
    }
}

fn join_terms(head: String, coeff: String, root: String) -> String {
    match (head.as_str(), coeff.as_str()) {
        (_, "0") => head,
        ("0", "1") => root,
        ("0", _) => format!("{coeff}·{root}"),
        (_, "1") => format!("{head} + {root}"),
        _ => format!("{head} + {coeff}·{root}"),
    }
}

impl fmt::Display for Qsqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = if self.n.is_zero() { BigRational::zero() } else { self.b.clone() };
        let coeff = if b.is_integer() { b.to_string() } else { format!("({b})") };
        f.write_str(&join_terms(self.a.to_string(), coeff, format!("√{}", self.n)))
    }
}

impl fmt::Display for Real2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |q: &Qsqrt| {
            let s = q.to_string();
            if s.contains(' ') { format!("({s})") } else { s }
        };
        let head = self.a.to_string();
        let coeff = if self.b.is_zero() { "0".to_string() } else { wrap(&self.b) };
        f.write_str(&join_terms(head, coeff, format!("√({})", self.w)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rat;

    fn n(v: i64) -> Arc<BigInt> {
        Arc::new(BigInt::from(v))
    }

    #[test]
    fn signs_in_q_sqrt2() {
        let two = n(2);
        // 3 − 2√2 > 0, 1 − √2 < 0, 7 − 5√2 < 0 (7² = 49 < 50)
        let q = |a, b| Qsqrt {
            a: rat(a, 1),
            b: rat(b, 1),
            n: two.clone(),
        };
        assert_eq!(q(3, -2).sign(), Ordering::Greater);
        assert_eq!(q(1, -1).sign(), Ordering::Less);
        assert_eq!(q(7, -5).sign(), Ordering::Less);
        assert_eq!(q(0, 0).sign(), Ordering::Equal);
        let x = q(3, -2);
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), Qsqrt::one(&two));
    }

    #[test]
    fn perfect_square_radicand() {
        let four = n(4);
        let x = Qsqrt {
            a: rat(2, 1),
            b: rat(-1, 1),
            n: four.clone(),
        };
        assert_eq!(x.sign(), Ordering::Equal);
        assert!(x.inv().is_none());
    }

    #[test]
    fn nested_root() {
        // θ = √(2 + √2) ≈ 1.8478; θ² − 2 − √2 = 0 and θ − 1.84 > 0
        let two = n(2);
        let w = Arc::new(Qsqrt {
            a: rat(2, 1),
            b: rat(1, 1),
            n: two.clone(),
        });
        let theta = Real2 {
            a: Qsqrt::zero(&two),
            b: Qsqrt::one(&two),
            w: w.clone(),
        };
        let sq = theta.mul(&theta);
        assert!(sq.sub(&Real2::from_q((*w).clone(), &w)).is_zero());
        assert_eq!(theta.add_rat(&rat(-184, 100)).sign(), Ordering::Greater);
        assert_eq!(theta.add_rat(&rat(-185, 100)).sign(), Ordering::Less);
        let inv = theta.inv().unwrap();
        assert!(inv.mul(&theta).add_rat(&rat(-1, 1)).is_zero());
        assert!((theta.to_f64() - 1.847_759_065).abs() < 1e-8);
    }
}
