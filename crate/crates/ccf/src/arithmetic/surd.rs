//! Exact arithmetic in `K(√Δ)` and quadratic surds over `K`.
//!
//! An element is `x + y·s` with `x, y ∈ K` and `s` the principal square root of `Δ`
//! (positive imaginary part, or positive real part when `Δ` is a positive integer).
//! Writing `s = S₁ + S₂·g` with real `S₁, S₂`, every lattice coordinate of an element
//! lies in the tower `Q(√|Δ|²)(√w)` with `w = S₂²`, so signs of quadrics are decided
//! exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::ball::{half_sqrt_d, BallComplex};
use super::finterval::FInterval;
use super::interval::DyInterval;
use super::locate::{finterval_coords, Locatable, Quadric};
use super::qsqrt::{Qsqrt, Real2};
use crate::error::{Error, Result};
use crate::rings::{KElem, Ring, RingElement};
use crate::util::lcm_all;

/// The field `K(√Δ)` with cached coordinates of the principal root.
#[derive(Debug)]
pub struct SurdField {
    ring: Ring,
    delta: RingElement,
    n: Arc<BigInt>,
    w: Arc<Qsqrt>,
    s1: Real2,
    s2: Real2,
    fs1: FInterval,
    fs2: FInterval,
}

impl SurdField {
    pub fn new(delta: RingElement) -> Result<Arc<Self>> {
        if delta.is_zero() {
            return Err(Error::ReduciblePolynomial);
        }
        let ring = delta.ring;
        let (n, w, s1, s2);
        if delta.b.is_zero() && delta.a.is_positive() {
            n = Arc::new(delta.a.clone());
            w = Arc::new(Qsqrt::one(&n));
            s1 = Real2::from_q(Qsqrt::root(&n), &w);
            s2 = Real2::rational(BigRational::zero(), &n, &w);
        } else {
            n = Arc::new(delta.norm());
            let re = KElem::from(&delta).re();
            let two_over_d = BigRational::new(2.into(), ring.d().into());
            w = Arc::new(Qsqrt::root(&n).add_rat(&-re).scale(&two_over_d));
            let zero = Qsqrt::zero(&n);
            s2 = Real2 {
                a: zero.clone(),
                b: Qsqrt::one(&n),
                w: w.clone(),
            };
            // Re s = Δ₂/(2θ), so S₁ = (Δ₂/(2w) − t/2)·θ
            let c = w
                .inv()
                .expect("w > 0 for non-positive Δ")
                .scale(&BigRational::new(delta.b.clone(), 2.into()))
                .add_rat(&BigRational::new((-ring.t()).into(), 2.into()));
            s1 = Real2 {
                a: zero,
                b: c,
                w: w.clone(),
            };
        }
        let fs1 = DyInterval::enclose_real2(&s1, 96).to_finterval();
        let fs2 = DyInterval::enclose_real2(&s2, 96).to_finterval();
        Ok(Arc::new(SurdField {
            ring,
            delta,
            n,
            w,
            s1,
            s2,
            fs1,
            fs2,
        }))
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn delta(&self) -> &RingElement {
        &self.delta
    }

    fn real(&self, r: BigRational) -> Real2 {
        Real2::rational(r, &self.n, &self.w)
    }

    /// Exact lattice coordinates `(u, v)` of `x + y·s`.
    fn coords(&self, x: &KElem, y: &KElem) -> (Real2, Real2) {
        let (x1, x2) = x.coords();
        let (y1, y2) = y.coords();
        let t = BigRational::from_integer(self.ring.t().into());
        let n = BigRational::from_integer(self.ring.n().into());
        let u = self
            .real(x1)
            .add(&self.s1.scale(&y1))
            .sub(&self.s2.scale(&(&n * &y2)));
        let v = self
            .real(x2)
            .add(&self.s2.scale(&(&y1 + &t * &y2)))
            .add(&self.s1.scale(&y2));
        (u, v)
    }

    fn coords_fi(&self, x: &KElem, y: &KElem) -> (FInterval, FInterval) {
        let (x1, x2) = finterval_coords(x);
        let (y1, y2) = finterval_coords(y);
        let t = self.ring.t() as f64;
        let n = self.ring.n() as f64;
        let u = x1.add(y1.mul(self.fs1)).sub(y2.mul(self.fs2).mul_f(n));
        let v = x2
            .add(y1.mul(self.fs2))
            .add(y2.mul(self.fs1))
            .add(y2.mul(self.fs2).mul_f(t));
        (u, v)
    }

    /// Approximate Cartesian coordinates of the principal root.
    pub fn root_approx(&self) -> (f64, f64) {
        self.ring.to_cartesian(self.fs1.mid(), self.fs2.mid())
    }
}

/// An element `x + y·√Δ` of `K(√Δ)`.
#[derive(Clone)]
pub struct LElem {
    field: Arc<SurdField>,
    pub x: KElem,
    pub y: KElem,
}

impl PartialEq for LElem {
    fn eq(&self, o: &Self) -> bool {
        self.field.delta == o.field.delta && self.x == o.x && self.y == o.y
    }
}

impl Eq for LElem {}

impl Hash for LElem {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.field.delta.hash(h);
        self.x.hash(h);
        self.y.hash(h);
    }
}

impl LElem {
    pub fn new(field: &Arc<SurdField>, x: KElem, y: KElem) -> Self {
        LElem {
            field: field.clone(),
            x,
            y,
        }
    }

    pub fn from_k(field: &Arc<SurdField>, x: KElem) -> Self {
        let y = KElem::zero(field.ring);
        LElem::new(field, x, y)
    }

    pub fn field(&self) -> &Arc<SurdField> {
        &self.field
    }

    pub fn ring(&self) -> Ring {
        self.field.ring
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        LElem::new(&self.field, &self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Self) -> Self {
        LElem::new(&self.field, &self.x - &o.x, &self.y - &o.y)
    }

    pub fn neg(&self) -> Self {
        LElem::new(&self.field, -&self.x, -&self.y)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = KElem::from(&self.field.delta);
        LElem::new(
            &self.field,
            &self.x * &o.x + &(&self.y * &o.y) * &d,
            &self.x * &o.y + &self.y * &o.x,
        )
    }

    pub fn add_k(&self, k: &KElem) -> Self {
        LElem::new(&self.field, &self.x + k, self.y.clone())
    }

    pub fn sub_k(&self, k: &KElem) -> Self {
        LElem::new(&self.field, &self.x - k, self.y.clone())
    }

    pub fn mul_k(&self, k: &KElem) -> Self {
        LElem::new(&self.field, &self.x * k, &self.y * k)
    }

    /// `x² − y²Δ`, the product of the element with its Galois conjugate over `K`.
    pub fn galois_norm(&self) -> KElem {
        &self.x * &self.x - &(&self.y * &self.y) * &KElem::from(&self.field.delta)
    }

    pub fn inv(&self) -> Result<Self> {
        let den = self.galois_norm();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let di = den.inv()?;
        Ok(LElem::new(&self.field, &self.x * &di, -&self.y * &di))
    }

    /// Exact lattice coordinates `(u, v)` with value `u + v·g`.
    pub fn coords(&self) -> (Real2, Real2) {
        self.field.coords(&self.x, &self.y)
    }

    pub fn coords_fi(&self) -> (FInterval, FInterval) {
        self.field.coords_fi(&self.x, &self.y)
    }

    /// `|z|²` exactly.
    pub fn abs2(&self) -> Real2 {
        let (u, v) = self.coords();
        let ring = self.ring();
        let t = BigRational::from_integer(ring.t().into());
        let n = BigRational::from_integer(ring.n().into());
        let mut q = u.mul(&u).add(&v.mul(&v).scale(&n));
        if !t.is_zero() {
            q = q.add(&u.mul(&v).scale(&t));
        }
        q
    }

    /// `|z|²` enclosed in `f64`.
    pub fn abs2_fi(&self) -> FInterval {
        let (u, v) = self.coords_fi();
        let ring = self.ring();
        let mut q = u.square().add(v.square().mul_f(ring.n() as f64));
        if ring.t() != 0 {
            q = q.add(u.mul(v).mul_f(ring.t() as f64));
        }
        q
    }

    /// Signs of the real and imaginary parts.
    pub fn re_im_signs(&self) -> (Ordering, Ordering) {
        let (u, v) = self.coords();
        let t = BigRational::new(self.ring().t().into(), 2.into());
        let re = u.add(&v.scale(&t));
        (re.sign(), v.sign())
    }

    pub fn approx(&self) -> (f64, f64) {
        let (u, v) = self.coords_fi();
        let loose = |i: FInterval| !i.is_finite() || i.width() > 1e-12 * (1.0 + i.mid().abs());
        if loose(u) || loose(v) {
            return self.enclose(96).center_f64();
        }
        self.ring().to_cartesian(u.mid(), v.mid())
    }

    /// A ball of radius at most `2^(4 − prec)` containing the value.
    pub fn enclose(&self, prec: u32) -> BallComplex {
        let (u, v) = self.coords();
        let bound = BigInt::from(16);
        let ring = self.ring();
        let half_t = BigRational::new(ring.t().into(), 2.into());
        let mut wp = prec + 32;
        loop {
            let du = DyInterval::enclose_real2(&u, wp);
            let dv = DyInterval::enclose_real2(&v, wp);
            let re = du.add(&dv.scale_rat(&half_t));
            let im = dv.mul(&half_sqrt_d(ring, wp));
            let b = BallComplex::from_box(&re, &im).with_precision(prec);
            if *b.radius_mantissa() <= bound {
                return b;
            }
            wp *= 2;
        }
    }
}

impl fmt::Debug for LElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})·√({})", self.x, self.y, self.field.delta)
    }
}

impl fmt::Display for LElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x.to_exact_string());
        }
        let s = format!("({})·√({})", self.y.to_exact_string(), self.field.delta);
        if self.x.is_zero() {
            f.write_str(&s)
        } else {
            write!(f, "{} + {s}", self.x.to_exact_string())
        }
    }
}

impl Locatable for LElem {
    fn approx(&self) -> (f64, f64) {
        LElem::approx(self)
    }

    fn quadric_sign(&self, q: &Quadric) -> Option<Ordering> {
        let (fu, fv) = self.coords_fi();
        if let Some(s) = q.eval_fi(fu, fv).sign() {
            return Some(s);
        }
        let (u, v) = self.coords();
        Some(q.eval(&u, &v).sign())
    }
}

/// Which root of the defining polynomial is meant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `(−b + √Δ)/2a` with the principal root.
    #[default]
    PositiveImaginary,
    /// `(−b − √Δ)/2a`.
    NegativeImaginary,
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive-imaginary" | "+" | "pos" => Ok(Branch::PositiveImaginary),
            "negative-imaginary" | "-" | "neg" => Ok(Branch::NegativeImaginary),
            other => Err(Error::Parse(format!("unknown branch {other:?}"))),
        }
    }
}

/// A point `x + y·√Δ ∉ K` with `Δ ∈ Γ` not a square.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticSurd(LElem);

/// The square root of `k` in `K`, if any.
pub fn k_sqrt(k: &KElem) -> Option<KElem> {
    let d = k.denom().clone();
    let m = &k.numer() * &RingElement::integer(k.ring(), d.clone());
    let r = m.sqrt()?;
    Some(KElem::from(&r).scale(&BigRational::new(BigInt::one(), d)))
}

impl QuadraticSurd {
    /// A root of `a z² + b z + c`.
    pub fn from_poly(a: &RingElement, b: &RingElement, c: &RingElement, branch: Branch) -> Result<Self> {
        a.check_ring(b)?;
        a.check_ring(c)?;
        if a.is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let four = RingElement::integer(a.ring, 4.into());
        let delta = b * b - &four * &(a * c);
        if delta.sqrt().is_some() {
            return Err(Error::ReduciblePolynomial);
        }
        let field = SurdField::new(delta)?;
        let two_a = KElem::from(a).scale(&BigRational::from_integer(2.into()));
        let inv = two_a.inv()?;
        let x = -&(&KElem::from(b) * &inv);
        let y = match branch {
            Branch::PositiveImaginary => inv,
            Branch::NegativeImaginary => -&inv,
        };
        Ok(QuadraticSurd(LElem::new(&field, x, y)))
    }

    /// Wraps an element of `K(√Δ) \ K`.
    pub fn from_lelem(e: LElem) -> Result<Self> {
        if e.y.is_zero() {
            return Err(Error::InQuotientField);
        }
        Ok(QuadraticSurd(e))
    }

    pub fn as_lelem(&self) -> &LElem {
        &self.0
    }

    pub fn ring(&self) -> Ring {
        self.0.ring()
    }

    pub fn x(&self) -> &KElem {
        &self.0.x
    }

    pub fn y(&self) -> &KElem {
        &self.0.y
    }

    pub fn delta(&self) -> &RingElement {
        &self.0.field.delta
    }

    pub fn field(&self) -> &Arc<SurdField> {
        &self.0.field
    }

    /// `(z − a)^{-1}`.
    pub fn step(&self, a: &RingElement) -> Self {
        let w = self.0.sub_k(&KElem::from(a));
        QuadraticSurd(w.inv().expect("a surd never equals an element of K"))
    }

    /// Exact equality, also across discriminants differing by a square factor.
    pub fn equals(&self, o: &Self) -> Result<bool> {
        if self.ring() != o.ring() {
            return Err(Error::RingMismatch(self.ring(), o.ring()));
        }
        if self.delta() == o.delta() {
            return Ok(self.0 == o.0);
        }
        let ratio = &KElem::from(self.delta()) * &KElem::from(o.delta()).inv()?;
        let c = k_sqrt(&ratio).ok_or(Error::IncomparableDiscriminants)?;
        // √Δ₁ = ε·c·√Δ₂; the two candidates are far apart, so f64 suffices for ε
        let (s1x, s1y) = self.0.field.root_approx();
        let (s2x, s2y) = o.0.field.root_approx();
        let (cx, cy) = c.approx();
        let (px, py) = (cx * s2x - cy * s2y, cx * s2y + cy * s2x);
        let dist_plus = (s1x - px).powi(2) + (s1y - py).powi(2);
        let dist_minus = (s1x + px).powi(2) + (s1y + py).powi(2);
        let c = if dist_plus <= dist_minus { c } else { -&c };
        Ok(self.x() == o.x() && &(self.y() * &c) == o.y())
    }

    /// Primitive `(A, B, C)` over `Γ` with `A z² + B z + C = 0`, `A` normalised among associates.
    pub fn min_poly(&self) -> (RingElement, RingElement, RingElement) {
        let ring = self.ring();
        let x = self.x();
        let coeffs = [
            KElem::one(ring),
            x.scale(&BigRational::from_integer((-2).into())),
            self.0.galois_norm(),
        ];
        let l = lcm_all(coeffs.iter().map(|k| k.denom()));
        let lr = BigRational::from_integer(l);
        let ints: Vec<RingElement> = coeffs
            .iter()
            .map(|k| k.scale(&lr).to_ring_element().expect("denominators cleared"))
            .collect();
        let g = ints[0].gcd(&ints[1]).gcd(&ints[2]);
        let mut ints: Vec<RingElement> = ints
            .iter()
            .map(|e| e.div_exact(&g).expect("gcd divides"))
            .collect();
        let target = ints[0].canonical_associate(false);
        let unit = ring
            .units()
            .into_iter()
            .find(|u| &ints[0] * u == target)
            .expect("associates differ by a unit");
        for e in ints.iter_mut() {
            *e = &*e * &unit;
        }
        (ints[0].clone(), ints[1].clone(), ints[2].clone())
    }

    /// Which root of [`min_poly`](Self::min_poly) this surd is.
    pub fn branch(&self) -> Branch {
        let (a, _, _) = self.min_poly();
        // 2Az + B = 2A·y·s, compared with the principal root of the new discriminant
        let two_a = KElem::from(&a).scale(&BigRational::from_integer(2.into()));
        let r = LElem::new(self.field(), KElem::zero(self.ring()), self.y() * &two_a);
        match r.re_im_signs() {
            (_, Ordering::Greater) | (Ordering::Greater, Ordering::Equal) => Branch::PositiveImaginary,
            _ => Branch::NegativeImaginary,
        }
    }

    pub fn embed(&self, prec: u32) -> BallComplex {
        self.0.enclose(prec.max(32))
    }

    pub fn approx(&self) -> (f64, f64) {
        self.0.approx()
    }
}

pub fn surd_from_poly(
    a: &RingElement,
    b: &RingElement,
    c: &RingElement,
    branch: Branch,
) -> Result<QuadraticSurd> {
    QuadraticSurd::from_poly(a, b, c, branch)
}

pub fn surd_step(z: &QuadraticSurd, a: &RingElement) -> QuadraticSurd {
    z.step(a)
}

pub fn surd_equals(u: &QuadraticSurd, v: &QuadraticSurd) -> Result<bool> {
    u.equals(v)
}

pub fn embed(z: &QuadraticSurd, prec: u32) -> BallComplex {
    z.embed(prec)
}

impl fmt::Debug for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Locatable for QuadraticSurd {
    fn approx(&self) -> (f64, f64) {
        self.0.approx()
    }

    fn quadric_sign(&self, q: &Quadric) -> Option<Ordering> {
        self.0.quadric_sign(q)
    }
}

#[derive(Serialize, Deserialize)]
struct SurdRepr {
    ring: Ring,
    poly: [String; 3],
    branch: Branch,
}

impl Serialize for QuadraticSurd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (a, b, c) = self.min_poly();
        SurdRepr {
            ring: self.ring(),
            poly: [a.to_string(), b.to_string(), c.to_string()],
            branch: self.branch(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticSurd {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SurdRepr::deserialize(d)?;
        let p = |s: &str| RingElement::parse(r.ring, s).map_err(serde::de::Error::custom);
        let (a, b, c) = (p(&r.poly[0])?, p(&r.poly[1])?, p(&r.poly[2])?);
        QuadraticSurd::from_poly(&a, &b, &c, r.branch).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rat;

    fn g(a: i64, b: i64) -> RingElement {
        RingElement::from_i64(Ring::Gaussian, a, b)
    }

    fn i_sqrt2() -> QuadraticSurd {
        QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(2, 0), Branch::PositiveImaginary).unwrap()
    }

    fn close(z: (f64, f64), w: (f64, f64)) -> bool {
        (z.0 - w.0).abs() < 1e-12 && (z.1 - w.1).abs() < 1e-12
    }

    #[test]
    fn from_poly_examples() {
        let z = i_sqrt2();
        assert_eq!(z.delta(), &g(-8, 0));
        assert_eq!(z.x(), &KElem::zero(Ring::Gaussian));
        assert_eq!(z.y(), &KElem::from_ints(Ring::Gaussian, 1, 0, 2));
        assert!(close(z.approx(), (0.0, 2f64.sqrt())));
        let w = QuadraticSurd::from_poly(&g(1, 0), &g(-1, 0), &g(1, 0), Branch::PositiveImaginary)
            .unwrap();
        assert!(close(w.approx(), (0.5, 3f64.sqrt() / 2.0)));
        let r = QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(1, 0), Branch::PositiveImaginary);
        assert_eq!(r, Err(Error::ReduciblePolynomial));
        let r = QuadraticSurd::from_poly(&g(0, 0), &g(1, 0), &g(1, 0), Branch::PositiveImaginary);
        assert_eq!(r, Err(Error::ZeroLeadingCoefficient));
    }

    #[test]
    fn steps_match_hand_values() {
        let z = i_sqrt2();
        let s2 = 2f64.sqrt();
        assert!(close(z.step(&g(0, 1)).approx(), (0.0, -(1.0 + s2))));
        assert!(close(z.step(&g(0, 2)).approx(), (0.0, (2.0 + s2) / 2.0)));
    }

    #[test]
    fn period_two_for_i_sqrt2() {
        let mut zs = vec![i_sqrt2()];
        for a in [g(0, 1), g(0, -2), g(0, 2), g(0, -2)] {
            let next = zs.last().unwrap().step(&a);
            zs.push(next);
        }
        assert!(!zs[0].equals(&zs[2]).unwrap());
        assert!(zs[1].equals(&zs[3]).unwrap());
        assert!(zs[2].equals(&zs[4]).unwrap());
    }

    #[test]
    fn equality_across_square_factors() {
        // i√2 as a root of z² + 2 and of 4z² + 8 (Δ = −8 and −128)
        let a = i_sqrt2();
        let b = QuadraticSurd::from_poly(&g(4, 0), &g(0, 0), &g(8, 0), Branch::PositiveImaginary)
            .unwrap();
        assert!(a.equals(&b).unwrap());
        let c = QuadraticSurd::from_poly(&g(4, 0), &g(0, 0), &g(8, 0), Branch::NegativeImaginary)
            .unwrap();
        assert!(!a.equals(&c).unwrap());
        let d = QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(3, 0), Branch::PositiveImaginary)
            .unwrap();
        assert_eq!(a.equals(&d), Err(Error::IncomparableDiscriminants));
    }

    #[test]
    fn embedding_encloses() {
        let z = i_sqrt2();
        let b = z.embed(64);
        assert!(b.radius_f64() <= 2f64.powi(-60));
        let sq = b.mul(&b);
        assert!(sq.contains_rational(&rat(-2, 1), &rat(0, 1)));
        let w = QuadraticSurd::from_poly(&g(1, 0), &g(-1, 0), &g(1, 0), Branch::PositiveImaginary)
            .unwrap();
        let (x, y) = w.embed(64).center_f64();
        assert!((x - 0.5).abs() < 1e-15 && (y - 0.8660254037844386).abs() < 1e-15);
    }

    #[test]
    fn min_poly_and_serde_round_trip() {
        let mut z = i_sqrt2();
        for a in [g(0, 1), g(0, -2), g(0, 2)] {
            z = z.step(&a);
            let (pa, pb, pc) = z.min_poly();
            // exact check that the polynomial vanishes
            let e = z.as_lelem();
            let val = e
                .mul(e)
                .mul_k(&KElem::from(&pa))
                .add(&e.mul_k(&KElem::from(&pb)))
                .add_k(&KElem::from(&pc));
            assert!(val.is_zero());
            let s = serde_json::to_string(&z).unwrap();
            let back: QuadraticSurd = serde_json::from_str(&s).unwrap();
            assert!(back.equals(&z).unwrap(), "{s}");
        }
    }

    #[test]
    fn negative_branch_round_trip() {
        for ring in [Ring::Eisenstein, Ring::Gaussian, Ring::Disc7] {
            let e = |a, b| RingElement::from_i64(ring, a, b);
            for br in [Branch::PositiveImaginary, Branch::NegativeImaginary] {
                let z = QuadraticSurd::from_poly(&e(2, 1), &e(-1, 3), &e(5, -2), br).unwrap();
                assert_eq!(z.branch(), br);
                let back: QuadraticSurd =
                    serde_json::from_value(serde_json::to_value(&z).unwrap()).unwrap();
                assert!(back.equals(&z).unwrap());
            }
        }
    }

    #[test]
    fn positive_real_discriminant() {
        // z² − z − 1 over G: golden ratio, Δ = 5
        let z = QuadraticSurd::from_poly(&g(1, 0), &g(-1, 0), &g(-1, 0), Branch::PositiveImaginary)
            .unwrap();
        assert!(close(z.approx(), ((1.0 + 5f64.sqrt()) / 2.0, 0.0)));
        let q = Quadric::disc(&KElem::zero(Ring::Gaussian), rat(1, 1));
        assert_eq!(z.quadric_sign(&q), Some(Ordering::Greater));
    }

    #[test]
    fn exact_boundary_sign() {
        // i√2 lies exactly on |z|² = 2
        let z = i_sqrt2();
        let q = Quadric::disc(&KElem::zero(Ring::Gaussian), rat(2, 1));
        assert_eq!(z.quadric_sign(&q), Some(Ordering::Equal));
        assert!(z.as_lelem().abs2().cmp_to(&z.field().real(rat(2, 1))) == Ordering::Equal);
    }
}
