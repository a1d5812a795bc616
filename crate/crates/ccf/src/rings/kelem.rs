use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{Ring, RingElement};
use crate::error::{Error, Result};
use crate::util::{int_to_f64, parse_rat};

/// An element `(a + b·g)/d` of the quotient field `K`, kept with `d > 0` and
/// `gcd(a, b, d) = 1` so that equal values are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KElem {
    ring: Ring,
    a: BigInt,
    b: BigInt,
    d: BigInt,
}

impl KElem {
    pub fn new(ring: Ring, a: BigInt, b: BigInt, d: BigInt) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        let mut k = KElem { ring, a, b, d };
        k.reduce();
        k
    }

    fn reduce(&mut self) {
        if self.d.is_negative() {
            self.a = -&self.a;
            self.b = -&self.b;
            self.d = -&self.d;
        }
        if self.d.is_one() {
            return;
        }
        let g = self.a.gcd(&self.b).gcd(&self.d);
        if !g.is_one() {
            self.a /= &g;
            self.b /= &g;
            self.d /= &g;
        }
    }

    pub fn zero(ring: Ring) -> Self {
        KElem::from_ints(ring, 0, 0, 1)
    }

    pub fn one(ring: Ring) -> Self {
        KElem::from_ints(ring, 1, 0, 1)
    }

    pub fn from_ints(ring: Ring, a: i64, b: i64, d: i64) -> Self {
        KElem::new(ring, a.into(), b.into(), d.into())
    }

    pub fn from_rational(ring: Ring, r: &BigRational) -> Self {
        KElem::new(ring, r.numer().clone(), BigInt::zero(), r.denom().clone())
    }

    /// `u + v·g` for rational lattice coordinates.
    pub fn from_coords(ring: Ring, u: BigRational, v: BigRational) -> Self {
        let d = u.denom().lcm(v.denom());
        let a = u.numer() * (&d / u.denom());
        let b = v.numer() * (&d / v.denom());
        KElem::new(ring, a, b, d)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn numer(&self) -> RingElement {
        RingElement::new(self.ring, self.a.clone(), self.b.clone())
    }

    pub fn denom(&self) -> &BigInt {
        &self.d
    }

    /// Lattice coordinates `(u, v)` with `self = u + v·g`.
    pub fn coords(&self) -> (BigRational, BigRational) {
        (
            BigRational::new(self.a.clone(), self.d.clone()),
            BigRational::new(self.b.clone(), self.d.clone()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.d.is_one()
    }

    pub fn to_ring_element(&self) -> Option<RingElement> {
        self.is_integral().then(|| self.numer())
    }

    pub fn is_real(&self) -> bool {
        self.b.is_zero()
    }

    /// `|x|²`.
    pub fn norm(&self) -> BigRational {
        BigRational::new(self.numer().norm(), &self.d * &self.d)
    }

    pub fn conj(&self) -> Self {
        let t = self.ring.t();
        KElem {
            ring: self.ring,
            a: &self.a + &self.b * t,
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    pub fn re(&self) -> BigRational {
        BigRational::new(&self.a * 2 + &self.b * self.ring.t(), &self.d * 2)
    }

    /// `Im x / Im g`, rational; `Im x = imag_coeff · √D/2`.
    pub fn imag_coeff(&self) -> BigRational {
        BigRational::new(self.b.clone(), self.d.clone())
    }

    /// `Re(x̄·y)`, rational.
    pub fn re_conj_mul(&self, y: &KElem) -> BigRational {
        (&self.conj() * y).re()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = self.numer().conj();
        let n = self.numer().norm();
        Ok(KElem::new(self.ring, &c.a * &self.d, &c.b * &self.d, n))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        KElem::new(
            self.ring,
            &self.a * r.numer(),
            &self.b * r.numer(),
            &self.d * r.denom(),
        )
    }

    pub fn approx(&self) -> (f64, f64) {
        let d = int_to_f64(&self.d);
        if d.is_finite() && d != 0.0 {
            self.ring
                .to_cartesian(int_to_f64(&self.a) / d, int_to_f64(&self.b) / d)
        } else {
            let (u, v) = self.coords();
            self.ring
                .to_cartesian(crate::util::rat_to_f64(&u), crate::util::rat_to_f64(&v))
        }
    }

    /// The ring element nearest to `self`, ties broken towards the greatest in
    /// `(Re, Im)` order.
    pub fn nearest_element(&self) -> RingElement {
        let u0 = self.a.div_floor(&self.d);
        let v0 = self.b.div_floor(&self.d);
        let mut best: Option<(BigRational, RingElement)> = None;
        for dv in -2..=3 {
            for du in -2..=3 {
                let c = RingElement::new(self.ring, &u0 + du, &v0 + dv);
                let dist = (self - &KElem::from(&c)).norm();
                let better = match &best {
                    None => true,
                    Some((bd, bc)) => match dist.cmp(bd) {
                        Ordering::Less => true,
                        Ordering::Equal => c.lex_cmp(bc) == Ordering::Greater,
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((dist, c));
                }
            }
        }
        best.expect("nonempty candidate box").1
    }

    /// Tie-break order `(Re, Im)`.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let (ra, rb) = (self.re(), other.re());
        ra.cmp(&rb)
            .then_with(|| self.imag_coeff().cmp(&other.imag_coeff()))
    }

    /// Formats as `(a+bi)/d` style string in the ring's notation.
    pub fn to_exact_string(&self) -> String {
        let n = self.numer();
        if self.d.is_one() {
            n.to_string()
        } else if n.b.is_zero() {
            format!("{}/{}", n.a, self.d)
        } else {
            format!("({})/{}", n, self.d)
        }
    }

    /// Parses `p`, `p/q`, `(a+bi)/d`, `a+bi`, or `x/y` with both parts ring elements.
    pub fn parse(ring: Ring, s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(r) = parse_rat(s) {
            return Ok(KElem::from_rational(ring, &r));
        }
        // Split at the last top-level '/'.
        let mut depth = 0i32;
        let mut split = None;
        for (i, c) in s.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => split = Some(i),
                _ => {}
            }
        }
        let strip = |t: &str| {
            let t = t.trim();
            t.strip_prefix('(')
                .and_then(|x| x.strip_suffix(')'))
                .unwrap_or(t)
                .to_string()
        };
        match split {
            Some(i) => {
                let num = RingElement::parse(ring, &strip(&s[..i]))?;
                let den = RingElement::parse(ring, &strip(&s[i + 1..]))?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(KElem::from(&num) / KElem::from(&den))
            }
            None => Ok(KElem::from(&RingElement::parse(ring, &strip(s))?)),
        }
    }
}

impl From<&RingElement> for KElem {
    fn from(x: &RingElement) -> Self {
        KElem {
            ring: x.ring,
            a: x.a.clone(),
            b: x.b.clone(),
            d: BigInt::one(),
        }
    }
}

impl From<RingElement> for KElem {
    fn from(x: RingElement) -> Self {
        KElem {
            ring: x.ring,
            a: x.a,
            b: x.b,
            d: BigInt::one(),
        }
    }
}

fn add_impl(x: &KElem, y: &KElem, sign: i32) -> KElem {
    debug_assert_eq!(x.ring, y.ring);
    let (ya, yb) = if sign > 0 {
        (y.a.clone(), y.b.clone())
    } else {
        (-&y.a, -&y.b)
    };
    if x.d == y.d {
        return KElem::new(x.ring, &x.a + ya, &x.b + yb, x.d.clone());
    }
    KElem::new(
        x.ring,
        &x.a * &y.d + ya * &x.d,
        &x.b * &y.d + yb * &x.d,
        &x.d * &y.d,
    )
}

fn mul_impl(x: &KElem, y: &KElem) -> KElem {
    debug_assert_eq!(x.ring, y.ring);
    let bd = &x.b * &y.b;
    KElem::new(
        x.ring,
        &x.a * &y.a - &bd * x.ring.n(),
        &x.a * &y.b + &x.b * &y.a + &bd * x.ring.t(),
        &x.d * &y.d,
    )
}

macro_rules! kop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&KElem> for &KElem {
            type Output = KElem;
            fn $f(self, o: &KElem) -> KElem {
                let g: fn(&KElem, &KElem) -> KElem = $body;
                g(self, o)
            }
        }
        impl $tr<KElem> for KElem {
            type Output = KElem;
            fn $f(self, o: KElem) -> KElem {
                (&self).$f(&o)
            }
        }
        impl $tr<&KElem> for KElem {
            type Output = KElem;
            fn $f(self, o: &KElem) -> KElem {
                (&self).$f(o)
            }
        }
        impl $tr<KElem> for &KElem {
            type Output = KElem;
            fn $f(self, o: KElem) -> KElem {
                self.$f(&o)
            }
        }
    };
}

kop!(Add, add, |x, y| add_impl(x, y, 1));
kop!(Sub, sub, |x, y| add_impl(x, y, -1));
kop!(Mul, mul, mul_impl);
kop!(Div, div, |x, y| mul_impl(x, &y.inv().expect("division by zero in K")));

impl Neg for &KElem {
    type Output = KElem;
    fn neg(self) -> KElem {
        KElem {
            ring: self.ring,
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }
}

impl Neg for KElem {
    type Output = KElem;
    fn neg(self) -> KElem {
        -&self
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_exact_string())
    }
}

impl fmt::Debug for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self, self.ring.id())
    }
}

/// JSON form `{"a": "p/q", "b": "p/q"}` in lattice coordinates.
pub mod json {
    use super::*;
    use crate::util::fmt_rat;
    use serde_json::{json, Value};

    pub fn to_json(x: &KElem) -> Value {
        let (u, v) = x.coords();
        json!({"a": fmt_rat(&u), "b": fmt_rat(&v)})
    }

    pub fn from_json(ring: Ring, v: &Value) -> Result<KElem> {
        let get = |k: &str| -> Result<BigRational> {
            match v.get(k) {
                None => Ok(BigRational::zero()),
                Some(Value::String(s)) => parse_rat(s),
                Some(Value::Number(n)) => parse_rat(&n.to_string()),
                Some(other) => Err(Error::Parse(format!("bad coordinate {other}"))),
            }
        };
        if let Value::String(s) = v {
            return KElem::parse(ring, s);
        }
        Ok(KElem::from_coords(ring, get("a")?, get("b")?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(r: Ring, a: i64, b: i64, d: i64) -> KElem {
        KElem::from_ints(r, a, b, d)
    }

    #[test]
    fn canonical_form() {
        let r = Ring::Gaussian;
        assert_eq!(k(r, 2, 4, 6), k(r, -1, -2, -3));
        assert_eq!(k(r, 2, 4, 6).denom(), &BigInt::from(3));
    }

    #[test]
    fn witness_quotient() {
        let r = Ring::Gaussian;
        let q = KElem::parse(r, "(2+i)/(1+i)").unwrap();
        assert_eq!(q.norm(), BigRational::new(5.into(), 2.into()));
        assert_eq!(q, k(r, 3, -1, 2));
    }

    #[test]
    fn nearest_with_tie_break() {
        let r = Ring::Gaussian;
        // 1/2 + i/2 is equidistant from 0, 1, i, 1+i: the greatest is 1+i.
        assert_eq!(
            k(r, 1, 1, 2).nearest_element(),
            RingElement::from_i64(r, 1, 1)
        );
        assert_eq!(k(r, 3, 1, 4).nearest_element(), RingElement::from_i64(r, 1, 0));
    }

    fn ring_strategy() -> impl Strategy<Value = Ring> {
        prop::sample::select(Ring::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn field_axioms(r in ring_strategy(), a in -50i64..50, b in -50i64..50, d in 1i64..30,
                        c in -50i64..50, e in -50i64..50, f in 1i64..30) {
            let x = k(r, a, b, d);
            let y = k(r, c, e, f);
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
            if !y.is_zero() {
                prop_assert_eq!(&(&x / &y) * &y, x.clone());
            }
            prop_assert_eq!((&x * &y).conj(), x.conj() * y.conj());
        }

        #[test]
        fn nearest_is_within_one(r in ring_strategy(), a in -500i64..500, b in -500i64..500, d in 1i64..40) {
            let x = k(r, a, b, d);
            let c = x.nearest_element();
            prop_assert!((&x - &KElem::from(&c)).norm() < BigRational::one());
            for u in r.elements_of_norm_at_most(4) {
                let other = &c + &u;
                let d0 = (&x - &KElem::from(&c)).norm();
                let d1 = (&x - &KElem::from(&other)).norm();
                prop_assert!(d0 <= d1);
            }
        }
    }
}
