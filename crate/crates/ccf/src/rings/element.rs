use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{KElem, Ring};
use crate::error::{Error, Result};
use crate::util::{int_to_f64, IntRepr};

/// `a + b·g` in the ring `Z[g]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    pub ring: Ring,
    pub a: BigInt,
    pub b: BigInt,
}

impl RingElement {
    pub fn new(ring: Ring, a: BigInt, b: BigInt) -> Self {
        RingElement { ring, a, b }
    }

    pub fn from_i64(ring: Ring, a: i64, b: i64) -> Self {
        RingElement::new(ring, a.into(), b.into())
    }

    pub fn zero(ring: Ring) -> Self {
        RingElement::from_i64(ring, 0, 0)
    }

    pub fn one(ring: Ring) -> Self {
        RingElement::from_i64(ring, 1, 0)
    }

    /// The generator `g` (`i` for G, `ω` for E).
    pub fn gen(ring: Ring) -> Self {
        RingElement::from_i64(ring, 0, 1)
    }

    pub fn integer(ring: Ring, n: BigInt) -> Self {
        RingElement::new(ring, n, BigInt::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// `x·x̄ = a² + t·ab + n·b²`.
    pub fn norm(&self) -> BigInt {
        let t = self.ring.t();
        let n = self.ring.n();
        &self.a * &self.a + &self.a * &self.b * t + &self.b * &self.b * n
    }

    /// `x + x̄ = 2a + t·b`.
    pub fn trace(&self) -> BigInt {
        &self.a * 2 + &self.b * self.ring.t()
    }

    /// Complex conjugate: `ḡ = t − g`.
    pub fn conj(&self) -> Self {
        RingElement::new(self.ring, &self.a + &self.b * self.ring.t(), -&self.b)
    }

    /// Twice the real part, `2a + t·b`.
    pub fn re2(&self) -> BigInt {
        self.trace()
    }

    /// Approximate Cartesian coordinates.
    pub fn approx(&self) -> (f64, f64) {
        self.ring.to_cartesian(int_to_f64(&self.a), int_to_f64(&self.b))
    }

    /// Order by `(Re x, Im x)`; this is the tie-break order of the algorithms.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re2()
            .cmp(&other.re2())
            .then_with(|| self.b.cmp(&other.b))
    }

    pub fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.ring, other.ring))
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = RingElement::one(self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient when `other` divides `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let num = self * &other.conj();
        let n = other.norm();
        let (qa, ra) = num.a.div_rem(&n);
        let (qb, rb) = num.b.div_rem(&n);
        (ra.is_zero() && rb.is_zero()).then(|| RingElement::new(self.ring, qa, qb))
    }

    /// Euclidean division with the nearest-element quotient: `self = q·other + r`, `N(r) < N(other)`.
    pub fn div_rem_nearest(&self, other: &Self) -> (Self, Self) {
        let q = (KElem::from(self) / KElem::from(other)).nearest_element();
        let r = self - &(&q * other);
        (q, r)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut x, mut y) = (self.clone(), other.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem_nearest(&y);
            x = y;
            y = r;
        }
        x
    }

    /// A square root in the ring, if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let m = crate::util::is_square(&self.norm())?;
        let tr = self.trace();
        let cands: Vec<RingElement> = match crate::util::is_square(&(&tr + &m * 2)) {
            Some(big_t) if !big_t.is_zero() => {
                let num = RingElement::new(self.ring, &self.a + &m, self.b.clone());
                match num.div_exact(&RingElement::integer(self.ring, big_t)) {
                    Some(w) => vec![w],
                    None => vec![],
                }
            }
            _ => {
                // w is purely imaginary: w = d·(2g − t)/2 and w² = −d²·D/4.
                let d4: BigInt = -&self.a * 4;
                let dd = self.ring.d();
                if !self.b.is_zero() || !(&d4 % BigInt::from(dd)).is_zero() {
                    return None;
                }
                let dsq = crate::util::is_square(&(&d4 / BigInt::from(dd)))?;
                let t = self.ring.t();
                if t % 2 != 0 && dsq.is_odd() {
                    // (2g − t)/2 is not integral; try the doubled representative.
                    return None;
                }
                let w = if t % 2 == 0 {
                    RingElement::new(self.ring, -&dsq * (t / 2), dsq.clone())
                } else {
                    let h = &dsq / 2;
                    RingElement::new(self.ring, -&h * t, &h * 2)
                };
                vec![w]
            }
        };
        cands
            .into_iter()
            .find(|w| &(w * w) == self)
            .map(|w| w.canonical_sign())
    }

    /// Chooses between `w` and `−w` the one greatest in the tie-break order.
    pub fn canonical_sign(self) -> Self {
        let neg = -&self;
        if neg.lex_cmp(&self) == Ordering::Greater {
            neg
        } else {
            self
        }
    }

    /// Among associates (and, if `with_conj`, their conjugates) the greatest in tie-break order.
    pub fn canonical_associate(&self, with_conj: bool) -> Self {
        let mut best = self.clone();
        let mut bases = vec![self.clone()];
        if with_conj {
            bases.push(self.conj());
        }
        for x in bases {
            for u in self.ring.units() {
                let y = &x * &u;
                if y.lex_cmp(&best) == Ordering::Greater {
                    best = y;
                }
            }
        }
        best
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("ring elements serialize")
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&RingElement> for &RingElement {
            type Output = RingElement;
            fn $f(self, o: &RingElement) -> RingElement {
                debug_assert_eq!(self.ring, o.ring);
                let g: fn(&RingElement, &RingElement) -> RingElement = $body;
                g(self, o)
            }
        }
        impl $tr<RingElement> for RingElement {
            type Output = RingElement;
            fn $f(self, o: RingElement) -> RingElement {
                (&self).$f(&o)
            }
        }
        impl $tr<&RingElement> for RingElement {
            type Output = RingElement;
            fn $f(self, o: &RingElement) -> RingElement {
                (&self).$f(o)
            }
        }
        impl $tr<RingElement> for &RingElement {
            type Output = RingElement;
            fn $f(self, o: RingElement) -> RingElement {
                self.$f(&o)
            }
        }
    };
}

binop!(Add, add, |x, y| RingElement::new(x.ring, &x.a + &y.a, &x.b + &y.b));
binop!(Sub, sub, |x, y| RingElement::new(x.ring, &x.a - &y.a, &x.b - &y.b));
binop!(Mul, mul, |x, y| {
    // (a + bg)(c + dg) = (ac − n·bd) + (ad + bc + t·bd)g
    let bd = &x.b * &y.b;
    RingElement::new(
        x.ring,
        &x.a * &y.a - &bd * x.ring.n(),
        &x.a * &y.b + &x.b * &y.a + &bd * x.ring.t(),
    )
});

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement::new(self.ring, -&self.a, -&self.b)
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.ring.gen_symbol();
        let (a, b) = (&self.a, &self.b);
        if b.is_zero() {
            return write!(f, "{a}");
        }
        let bpart = if b.is_one() {
            g.to_string()
        } else if *b == -BigInt::one() {
            format!("-{g}")
        } else {
            format!("{b}{g}")
        };
        if a.is_zero() {
            write!(f, "{bpart}")
        } else if b.is_negative() {
            write!(f, "{a}{bpart}")
        } else {
            write!(f, "{a}+{bpart}")
        }
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self, self.ring.id())
    }
}

impl RingElement {
    /// Parses `a+bi` (G), `a+bw` (E) or `a+bg` (other rings); also accepts `j` for `i`.
    pub fn parse(ring: Ring, s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not an element of {ring}: {s:?}"));
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad());
        }
        let sym: &[char] = match ring {
            Ring::Gaussian => &['i', 'j'],
            Ring::Eisenstein => &['w', 'ω'],
            _ => &['g'],
        };
        // Split into signed terms.
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (k, c) in s.chars().enumerate() {
            if (c == '+' || c == '-') && k > 0 && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(c);
        }
        terms.push(cur);
        let (mut a, mut b) = (BigInt::zero(), BigInt::zero());
        for term in terms {
            let (body, is_gen) = match term.strip_suffix(sym) {
                Some(rest) => (rest.trim_end_matches('*').to_string(), true),
                None => (term.clone(), false),
            };
            let coef: BigInt = match body.as_str() {
                "" | "+" => BigInt::one(),
                "-" => -BigInt::one(),
                x => x.parse().map_err(|_| bad())?,
            };
            if is_gen {
                b += coef;
            } else {
                a += coef;
            }
        }
        Ok(RingElement::new(ring, a, b))
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    ring: Ring,
    a: IntRepr,
    b: IntRepr,
}

impl Serialize for RingElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr {
            ring: self.ring,
            a: (&self.a).into(),
            b: (&self.b).into(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ElementRepr::deserialize(d)?;
        let a = BigInt::try_from(r.a).map_err(serde::de::Error::custom)?;
        let b = BigInt::try_from(r.b).map_err(serde::de::Error::custom)?;
        Ok(RingElement::new(r.ring, a, b))
    }
}

/// The even Gaussian integers: `a + bi` with `a + b` even.
pub fn is_even_gaussian(x: &RingElement) -> Result<bool> {
    if x.ring != Ring::Gaussian {
        return Err(Error::WrongRing {
            expected: Ring::Gaussian,
            found: x.ring,
        });
    }
    Ok((&x.a + &x.b).is_even())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(a: i64, b: i64) -> RingElement {
        RingElement::from_i64(Ring::Gaussian, a, b)
    }

    fn e(a: i64, b: i64) -> RingElement {
        RingElement::from_i64(Ring::Eisenstein, a, b)
    }

    #[test]
    fn norms() {
        assert_eq!(g(1, 1).norm(), 2.into());
        assert_eq!(e(2, 1).norm(), 3.into());
        assert_eq!(g(0, 0).norm(), 0.into());
        // ω·ω̄ = 1 and ω² + ω + 1 = 0
        let w = RingElement::gen(Ring::Eisenstein);
        assert!((&(&w * &w) + &w + RingElement::one(Ring::Eisenstein)).is_zero());
        assert!((&w * &w.conj()).is_unit());
    }

    #[test]
    fn generator_relations() {
        for r in Ring::ALL {
            let x = RingElement::gen(r);
            let lhs = &x * &x;
            let rhs = RingElement::from_i64(r, -r.n(), r.t());
            assert_eq!(lhs, rhs, "{r}");
        }
    }

    #[test]
    fn even_gaussian() {
        assert!(is_even_gaussian(&g(1, 1)).unwrap());
        assert!(is_even_gaussian(&g(0, 2)).unwrap());
        assert!(!is_even_gaussian(&g(1, 0)).unwrap());
        assert!(is_even_gaussian(&e(1, 1)).is_err());
    }

    #[test]
    fn parse_and_display() {
        for s in ["1+i", "-2i", "3", "-1-i", "i", "0"] {
            let x = RingElement::parse(Ring::Gaussian, s).unwrap();
            assert_eq!(x.to_string(), s);
        }
        assert_eq!(RingElement::parse(Ring::Eisenstein, "2+w").unwrap(), e(2, 1));
        assert_eq!(RingElement::parse(Ring::Gaussian, "1 - 2*i").unwrap(), g(1, -2));
        assert!(RingElement::parse(Ring::Gaussian, "1+w").is_err());
    }

    #[test]
    fn json_round_trip() {
        let x = RingElement::new(
            Ring::Eisenstein,
            "123456789012345678901234567890".parse().unwrap(),
            (-7).into(),
        );
        let j = serde_json::to_string(&x).unwrap();
        assert!(j.contains("\"123456789012345678901234567890\""));
        assert_eq!(serde_json::from_str::<RingElement>(&j).unwrap(), x);
        assert_eq!(
            serde_json::to_string(&g(1, -1)).unwrap(),
            r#"{"ring":"G","a":1,"b":-1}"#
        );
    }

    #[test]
    fn square_roots() {
        assert_eq!(g(-4, 0).sqrt(), Some(g(0, 2)));
        assert_eq!(g(-8, 0).sqrt(), None);
        assert_eq!(g(0, 2).sqrt().map(|w| w.norm()), Some(2.into()));
        for r in Ring::ALL {
            for x in r.elements_of_norm_at_most(60) {
                let sq = &x * &x;
                let w = sq.sqrt().expect("a square has a root");
                assert!(w == x || w == -&x, "{r}: {x:?}");
            }
        }
        assert_eq!(e(-3, 0).sqrt().map(|w| w.norm()), Some(3.into()));
    }

    #[test]
    fn gcd_euclidean() {
        let a = g(5, 0);
        let b = g(2, 1);
        let d = a.gcd(&b);
        assert!(d.norm() == 5.into());
        for r in Ring::ALL {
            let x = RingElement::from_i64(r, 17, 9);
            let y = RingElement::from_i64(r, -4, 11);
            let d = x.gcd(&y);
            assert!(x.div_exact(&d).is_some() && y.div_exact(&d).is_some());
        }
    }

    fn ring_strategy() -> impl Strategy<Value = Ring> {
        prop::sample::select(Ring::ALL.to_vec())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn norm_is_multiplicative(r in ring_strategy(), a in -10_000i64..10_000, b in -10_000i64..10_000,
                                  c in -10_000i64..10_000, d in -10_000i64..10_000) {
            let x = RingElement::from_i64(r, a, b);
            let y = RingElement::from_i64(r, c, d);
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
            prop_assert!(x.norm() >= BigInt::zero());
            prop_assert_eq!(x.norm().is_zero(), x.is_zero());
        }

        #[test]
        fn conjugation_is_ring_automorphism(r in ring_strategy(), a in -99i64..99, b in -99i64..99, c in -99i64..99, d in -99i64..99) {
            let x = RingElement::from_i64(r, a, b);
            let y = RingElement::from_i64(r, c, d);
            prop_assert_eq!((&x * &y).conj(), x.conj() * y.conj());
            prop_assert_eq!(x.conj().conj(), x.clone());
            prop_assert_eq!(&x * &x.conj(), RingElement::integer(r, x.norm()));
        }
    }
}
