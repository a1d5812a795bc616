//! Sign tests of real quadrics `a|z|² + 2Re(b̄z) + c` at exact and enclosed points.
//!
//! Every region boundary used by the algorithms is such a quadric (a circle or a line), so a
//! point type only needs to decide the sign of one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cmp::Ordering;

use super::finterval::FInterval;
use super::qsqrt::Real2;
use crate::rings::{KElem, Ring};
use crate::util::rat_sign;

/// A coordinate domain in which quadrics can be evaluated.
pub trait Coord: Clone {
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, r: &BigRational) -> Self;
    fn add_rat(&self, r: &BigRational) -> Self;
    /// `None` when an enclosure straddles zero.
    fn sign(&self) -> Option<Ordering>;
}

impl Coord for BigRational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, r: &BigRational) -> Self {
        self * r
    }
    fn add_rat(&self, r: &BigRational) -> Self {
        self + r
    }
    fn sign(&self) -> Option<Ordering> {
        Some(rat_sign(self))
    }
}

impl Coord for Real2 {
    fn add(&self, o: &Self) -> Self {
        Real2::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Real2::mul(self, o)
    }
    fn scale(&self, r: &BigRational) -> Self {
        Real2::scale(self, r)
    }
    fn add_rat(&self, r: &BigRational) -> Self {
        Real2::add_rat(self, r)
    }
    fn sign(&self) -> Option<Ordering> {
        Some(Real2::sign(self))
    }
}

impl Coord for FInterval {
    fn add(&self, o: &Self) -> Self {
        FInterval::add(*self, *o)
    }
    fn mul(&self, o: &Self) -> Self {
        FInterval::mul(*self, *o)
    }
    fn scale(&self, r: &BigRational) -> Self {
        FInterval::mul(*self, FInterval::from_rat(r))
    }
    fn add_rat(&self, r: &BigRational) -> Self {
        FInterval::add(*self, FInterval::from_rat(r))
    }
    fn sign(&self) -> Option<Ordering> {
        FInterval::sign(*self)
    }
}

/// The real function `z ↦ a|z|² + 2Re(b̄z) + c` with `a, c ∈ Q` and `b ∈ K`.
#[derive(Clone)]
pub struct Quadric {
    a: BigRational,
    b: KElem,
    c: BigRational,
    // value = a·(u² + t·uv + n·v²) + lu·u + lv·v + c in lattice coordinates
    lu: BigRational,
    lv: BigRational,
    f: [FInterval; 4],
}

impl PartialEq for Quadric {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b && self.c == o.c
    }
}

impl Eq for Quadric {}

impl std::hash::Hash for Quadric {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.a.hash(h);
        self.b.hash(h);
        self.c.hash(h);
    }
}

impl std::fmt::Debug for Quadric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Quadric({}|z|² + 2Re(({})‾z) + {})", self.a, self.b, self.c)
    }
}

impl Quadric {
    pub fn new(a: BigRational, b: KElem, c: BigRational) -> Self {
        let ring = b.ring();
        let (b1, b2) = b.coords();
        let t = BigRational::from_integer(ring.t().into());
        let n = BigRational::from_integer(ring.n().into());
        let two = two();
        let lu = &two * &b1 + &t * &b2;
        let lv = &t * &b1 + two * n * &b2;
        let f = [
            FInterval::from_rat(&a),
            FInterval::from_rat(&lu),
            FInterval::from_rat(&lv),
            FInterval::from_rat(&c),
        ];
        Quadric { a, b, c, lu, lv, f }
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &KElem {
        &self.b
    }

    pub fn c(&self) -> &BigRational {
        &self.c
    }

    pub fn ring(&self) -> Ring {
        self.b.ring()
    }

    /// `|z − center|² − r2`.
    pub fn disc(center: &KElem, r2: BigRational) -> Self {
        Quadric::new(BigRational::one(), -center, center.norm() - r2)
    }

    /// `2(Re(n̄z) − k)`, negative on the half-plane `Re(n̄z) < k`.
    pub fn halfplane(normal: &KElem, k: &BigRational) -> Self {
        Quadric::new(BigRational::zero(), normal.clone(), -k * BigRational::from_integer(2.into()))
    }

    /// `|z − p|² − |z − q|²`, negative where `z` is closer to `p`.
    pub fn bisector(p: &KElem, q: &KElem) -> Self {
        Quadric::new(BigRational::zero(), q - p, p.norm() - q.norm())
    }

    pub fn is_linear(&self) -> bool {
        self.a.is_zero()
    }

    /// Value at `1/z` times `|z|²`.
    pub fn invert(&self) -> Self {
        Quadric::new(self.c.clone(), self.b.conj(), self.a.clone())
    }

    /// Value at `z − t`.
    pub fn translate(&self, t: &KElem) -> Self {
        let b = &self.b - &t.scale(&self.a);
        let two = BigRational::from_integer(2.into());
        let c = &self.a * t.norm() - two * self.b.re_conj_mul(t) + &self.c;
        Quadric::new(self.a.clone(), b, c)
    }

    /// Value at `−z`.
    pub fn negate(&self) -> Self {
        Quadric::new(self.a.clone(), -&self.b, self.c.clone())
    }

    /// Value at `z̄`.
    pub fn conjugate(&self) -> Self {
        Quadric::new(self.a.clone(), self.b.conj(), self.c.clone())
    }

    /// Value at `z/k` times `|k|²`.
    pub fn scale_by(&self, k: &KElem) -> Self {
        Quadric::new(self.a.clone(), &self.b * k, &self.c * k.norm())
    }

    pub fn eval<C: Coord>(&self, u: &C, v: &C) -> C {
        let ring = self.ring();
        let mut val = u.scale(&self.lu).add(&v.scale(&self.lv)).add_rat(&self.c);
        if !self.a.is_zero() {
            let t = BigRational::from_integer(ring.t().into());
            let n = BigRational::from_integer(ring.n().into());
            let mut q = u.mul(u).add(&v.mul(v).scale(&n));
            if !t.is_zero() {
                q = q.add(&u.mul(v).scale(&t));
            }
            val = val.add(&q.scale(&self.a));
        }
        val
    }

    /// Interval evaluation with cached coefficient enclosures.
    pub fn eval_fi(&self, u: FInterval, v: FInterval) -> FInterval {
        let [fa, flu, flv, fc] = self.f;
        let mut val = u.mul(flu).add(v.mul(flv)).add(fc);
        if !self.a.is_zero() {
            let ring = self.ring();
            let mut q = u.square().add(v.square().mul_f(ring.n() as f64));
            if ring.t() != 0 {
                q = q.add(u.mul(v).mul_f(ring.t() as f64));
            }
            val = val.add(q.mul(fa));
        }
        val
    }

    pub fn eval_f64(&self, (x, y): (f64, f64)) -> f64 {
        let (bx, by) = self.b.approx();
        crate::util::rat_to_f64(&self.a) * (x * x + y * y)
            + 2.0 * (bx * x + by * y)
            + crate::util::rat_to_f64(&self.c)
    }

    pub fn eval_k(&self, z: &KElem) -> BigRational {
        &self.a * z.norm() + BigRational::from_integer(2.into()) * self.b.re_conj_mul(z) + &self.c
    }
}

/// A point whose position relative to quadrics can be decided.
pub trait Locatable {
    /// Approximate Cartesian coordinates.
    fn approx(&self) -> (f64, f64);
    /// Sign of the quadric at the point; `None` when an enclosure is too wide to decide.
    fn quadric_sign(&self, q: &Quadric) -> Option<Ordering>;
    /// Working precision for enclosures, 0 for exact points.
    fn precision_bits(&self) -> u32 {
        0
    }
    /// Radius of the enclosure around `approx`, 0 for exact points.
    fn approx_radius(&self) -> f64 {
        0.0
    }
}

pub(crate) fn finterval_coords(k: &KElem) -> (FInterval, FInterval) {
    let d = FInterval::from_int(k.denom());
    let n = k.numer();
    (
        FInterval::from_int(&n.a).div(d),
        FInterval::from_int(&n.b).div(d),
    )
}

impl Locatable for KElem {
    fn approx(&self) -> (f64, f64) {
        KElem::approx(self)
    }

    fn quadric_sign(&self, q: &Quadric) -> Option<Ordering> {
        let (fu, fv) = finterval_coords(self);
        if let Some(s) = q.eval_fi(fu, fv).sign() {
            return Some(s);
        }
        Some(rat_sign(&q.eval_k(self)))
    }
}

pub fn sign_to_member(s: Option<Ordering>, strict: bool) -> Option<bool> {
    s.map(|s| match s {
        Ordering::Less => true,
        Ordering::Equal => !strict,
        Ordering::Greater => false,
    })
}

pub fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rat;

    fn g(a: i64, b: i64, d: i64) -> KElem {
        KElem::from_ints(Ring::Gaussian, a, b, d)
    }

    #[test]
    fn disc_signs() {
        let q = Quadric::disc(&g(2, 0, 1), rat(1, 1));
        assert_eq!(g(2, 0, 1).quadric_sign(&q), Some(Ordering::Less));
        assert_eq!(g(3, 0, 1).quadric_sign(&q), Some(Ordering::Equal));
        assert_eq!(g(0, 0, 1).quadric_sign(&q), Some(Ordering::Greater));
    }

    #[test]
    fn inversion_matches_reciprocal() {
        let q = Quadric::disc(&g(1, 1, 2), rat(9, 400));
        let qi = q.invert();
        for (a, b, d) in [(1, 1, 1), (3, -1, 2), (7, 2, 5), (-4, 9, 7)] {
            let z = g(a, b, d);
            assert_eq!(
                z.quadric_sign(&qi),
                z.inv().unwrap().quadric_sign(&q),
                "{z}"
            );
        }
    }

    #[test]
    fn transforms_agree_pointwise() {
        let ring = Ring::Eisenstein;
        let q = Quadric::new(rat(2, 3), KElem::from_ints(ring, 1, -2, 5), rat(-1, 7));
        let t = KElem::from_ints(ring, 3, 1, 4);
        let k = KElem::from_ints(ring, 2, 5, 3);
        for (a, b, d) in [(1, 1, 1), (3, -1, 2), (7, 2, 5), (-4, 9, 7)] {
            let z = KElem::from_ints(ring, a, b, d);
            assert_eq!(q.translate(&t).eval_k(&z), q.eval_k(&(&z - &t)));
            assert_eq!(q.negate().eval_k(&z), q.eval_k(&-&z));
            assert_eq!(q.conjugate().eval_k(&z), q.eval_k(&z.conj()));
            assert_eq!(q.scale_by(&k).eval_k(&z), q.eval_k(&(&z / &k)) * k.norm());
            assert_eq!(q.invert().eval_k(&z), q.eval_k(&z.inv().unwrap()) * z.norm());
            let (u, v) = z.coords();
            assert_eq!(q.eval(&u, &v), q.eval_k(&z));
        }
    }
}
