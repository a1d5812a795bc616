//! Planar regions bounded by circles and lines, with exact membership and exact inversion.
//!
//! A region is a boolean tree over quadric leaves `{q < 0}` (open) or `{q ≤ 0}` (closed).
//! Translation, the symmetries, scaling and inversion `E ↦ E^{-1}` act on the leaves, so
//! every derived region stays exactly representable.

pub mod verify;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::cmp::Ordering;

use crate::arithmetic::locate::{sign_to_member, Locatable, Quadric};
use crate::error::{Error, Result};
use crate::rings::{kelem_json, KElem, Ring, SymmetryElement};
use crate::util::{fmt_rat, parse_rat, rat};

pub use verify::{verify_cor_gen, verify_geom_hurwitz, CheckReport, Condition, GeomReport, SampleMode};

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// `{q < 0}` when `strict`, `{q ≤ 0}` otherwise.
    Leaf { quadric: Quadric, strict: bool },
    Union(Vec<Region>),
    Inter(Vec<Region>),
    Compl(Box<Region>),
}

/// `i·√D`, a purely imaginary element of `K` used to rotate directions by 90°.
pub fn imaginary_unit_multiple(ring: Ring) -> KElem {
    KElem::from_ints(ring, -ring.t(), 2, 1)
}

impl Region {
    pub fn leaf(quadric: Quadric, strict: bool) -> Self {
        Region::Leaf { quadric, strict }
    }

    pub fn union(parts: Vec<Region>) -> Self {
        Region::Union(parts)
    }

    pub fn inter(parts: Vec<Region>) -> Self {
        Region::Inter(parts)
    }

    pub fn complement(self) -> Self {
        match self {
            Region::Compl(r) => *r,
            r => Region::Compl(Box::new(r)),
        }
    }

    pub fn minus(self, other: Region) -> Self {
        Region::Inter(vec![self, other.complement()])
    }

    /// `B(center, √r2)`, closed or open.
    pub fn disc(center: &KElem, r2: BigRational, closed: bool) -> Self {
        Region::leaf(Quadric::disc(center, r2), !closed)
    }

    /// `{Re(n̄z) ≤ k}` (or `<` when open).
    pub fn halfplane(normal: &KElem, offset: &BigRational, closed: bool) -> Self {
        Region::leaf(Quadric::halfplane(normal, offset), !closed)
    }

    /// A convex polygon with vertices in counter-clockwise order.
    pub fn convex_polygon(vertices: &[KElem], closed: bool) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::ParameterOutOfRange("a polygon needs 3 vertices".into()));
        }
        let ring = vertices[0].ring();
        let rot = imaginary_unit_multiple(ring);
        let mut sides = Vec::new();
        for (k, v) in vertices.iter().enumerate() {
            let w = &vertices[(k + 1) % vertices.len()];
            // outward normal of a counter-clockwise edge is the edge turned clockwise
            let n = -&(&(w - v) * &rot);
            let off = n.re_conj_mul(v);
            let third = &vertices[(k + 2) % vertices.len()];
            if n.re_conj_mul(third) >= off {
                return Err(Error::ParameterOutOfRange(
                    "polygon vertices are not strictly convex and counter-clockwise".into(),
                ));
            }
            sides.push(Region::halfplane(&n, &off, closed));
        }
        Ok(Region::Inter(sides))
    }

    /// The closed diamond `|x| + |y| ≤ 1` (Gaussian ring).
    pub fn diamond_h() -> Self {
        let g = |a, b| KElem::from_ints(Ring::Gaussian, a, b, 1);
        Region::convex_polygon(&[g(1, 0), g(0, 1), g(-1, 0), g(0, -1)], true)
            .expect("diamond is convex")
    }

    /// The closed square `|x|, |y| ≤ ½` (Gaussian ring).
    pub fn square_s() -> Self {
        let h = |a, b| KElem::from_ints(Ring::Gaussian, a, b, 2);
        Region::convex_polygon(&[h(1, -1), h(1, 1), h(-1, 1), h(-1, -1)], true)
            .expect("square is convex")
    }

    /// `χH` where `H = {2Re(ūz) ≤ 1 for all units u}` is the Eisenstein Voronoi hexagon.
    pub fn hexagon_h(chi: &BigRational) -> Self {
        let half = chi / BigRational::from_integer(2.into());
        Region::Inter(
            Ring::Eisenstein
                .units()
                .iter()
                .map(|u| Region::halfplane(&KElem::from(u), &half, true))
                .collect(),
        )
    }

    /// Open corner discs `B(σ(1+i)/2, r)` of the square.
    pub fn corner_discs(r: &BigRational) -> Self {
        Region::Union(
            corners()
                .iter()
                .map(|c| Region::disc(c, r * r, false))
                .collect(),
        )
    }

    /// `S_r = S ∪ corner discs`.
    pub fn corner_set(r: &BigRational) -> Self {
        Region::Union(vec![Region::square_s(), Region::corner_discs(r)])
    }

    /// `Q_h = {0 ≤ x ≤ ½, −½ ≤ y ≤ 0, (1−x)² + (1+y)² < 1}`.
    pub fn q_h() -> Self {
        let g = |a, b| KElem::from_ints(Ring::Gaussian, a, b, 1);
        let zero = BigRational::zero();
        let half = rat(1, 2);
        Region::Inter(vec![
            Region::halfplane(&g(-1, 0), &zero, true),
            Region::halfplane(&g(1, 0), &half, true),
            Region::halfplane(&g(0, -1), &half, true),
            Region::halfplane(&g(0, 1), &zero, true),
            Region::disc(&g(1, -1), BigRational::one(), false),
        ])
    }

    /// `Q_r = Q_h ∪ B(½(1−i), r)`.
    pub fn q_r(r: &BigRational) -> Self {
        let c = KElem::from_ints(Ring::Gaussian, 1, -1, 2);
        Region::Union(vec![Region::q_h(), Region::disc(&c, r * r, false)])
    }

    /// Three-valued membership: `None` when an enclosure straddles a boundary.
    pub fn contains<P: Locatable + ?Sized>(&self, z: &P) -> Option<bool> {
        match self {
            Region::Leaf { quadric, strict } => sign_to_member(z.quadric_sign(quadric), *strict),
            Region::Union(parts) => {
                let mut undecided = false;
                for p in parts {
                    match p.contains(z) {
                        Some(true) => return Some(true),
                        None => undecided = true,
                        Some(false) => {}
                    }
                }
                (!undecided).then_some(false)
            }
            Region::Inter(parts) => {
                let mut undecided = false;
                for p in parts {
                    match p.contains(z) {
                        Some(false) => return Some(false),
                        None => undecided = true,
                        Some(true) => {}
                    }
                }
                (!undecided).then_some(true)
            }
            Region::Compl(r) => r.contains(z).map(|b| !b),
        }
    }

    /// Floating-point membership, for plotting and prefilters only.
    pub fn contains_f64(&self, p: (f64, f64)) -> bool {
        match self {
            Region::Leaf { quadric, strict } => {
                let v = quadric.eval_f64(p);
                if *strict {
                    v < 0.0
                } else {
                    v <= 0.0
                }
            }
            Region::Union(parts) => parts.iter().any(|r| r.contains_f64(p)),
            Region::Inter(parts) => parts.iter().all(|r| r.contains_f64(p)),
            Region::Compl(r) => !r.contains_f64(p),
        }
    }

    pub fn map_leaves(&self, f: &impl Fn(&Quadric) -> Quadric) -> Self {
        match self {
            Region::Leaf { quadric, strict } => Region::leaf(f(quadric), *strict),
            Region::Union(parts) => Region::Union(parts.iter().map(|r| r.map_leaves(f)).collect()),
            Region::Inter(parts) => Region::Inter(parts.iter().map(|r| r.map_leaves(f)).collect()),
            Region::Compl(r) => Region::Compl(Box::new(r.map_leaves(f))),
        }
    }

    /// `t + self`.
    pub fn translate(&self, t: &KElem) -> Self {
        self.map_leaves(&|q| q.translate(t))
    }

    /// `σ(self)`.
    pub fn apply_symmetry(&self, s: SymmetryElement) -> Self {
        self.map_leaves(&|q| {
            let q = if s.conjugate { q.conjugate() } else { q.clone() };
            if s.negate {
                q.negate()
            } else {
                q
            }
        })
    }

    /// `k · self` for `k ≠ 0`.
    pub fn scale(&self, k: &KElem) -> Self {
        self.map_leaves(&|q| q.scale_by(k))
    }

    /// `{w ≠ 0 : 1/w ∈ self}`; membership of `w = 0` is not meaningful.
    pub fn invert(&self) -> Self {
        self.map_leaves(&|q| q.invert())
    }

    pub fn leaves(&self) -> Vec<&Quadric> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Quadric>) {
        match self {
            Region::Leaf { quadric, .. } => out.push(quadric),
            Region::Union(p) | Region::Inter(p) => p.iter().for_each(|r| r.collect_leaves(out)),
            Region::Compl(r) => r.collect_leaves(out),
        }
    }

    /// If the region is a single leaf, it as a disc or half-plane.
    pub fn as_disc(&self) -> Option<Disc> {
        match self {
            Region::Leaf { quadric, strict } => Disc::from_quadric(quadric, !*strict),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Region::Leaf { quadric, strict } => match Disc::from_quadric(quadric, !*strict) {
                Some(d) => d.to_json(),
                None => json!({
                    "op": "quadric",
                    "a": fmt_rat(quadric.a()),
                    "b": quadric.b().to_exact_string(),
                    "c": fmt_rat(quadric.c()),
                    "strict": strict,
                }),
            },
            Region::Union(p) => json!({"op": "union", "args": p.iter().map(Region::to_json).collect::<Vec<_>>()}),
            Region::Inter(p) => json!({"op": "inter", "args": p.iter().map(Region::to_json).collect::<Vec<_>>()}),
            Region::Compl(r) => json!({"op": "compl", "arg": r.to_json()}),
        }
    }

    /// Parses the JSON region language.
    pub fn from_json(ring: Ring, v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("region: {m}"));
        let op = v.get("op").and_then(Value::as_str).ok_or_else(|| bad("missing op"))?;
        let rat_field = |k: &str| -> Result<BigRational> {
            match v.get(k) {
                Some(Value::String(s)) => parse_rat(s),
                Some(Value::Number(n)) => parse_rat(&n.to_string()),
                _ => Err(bad(&format!("missing {k}"))),
            }
        };
        let k_field = |k: &str| -> Result<KElem> {
            kelem_json::from_json(ring, v.get(k).ok_or_else(|| bad(&format!("missing {k}")))?)
        };
        let closed = v.get("closed").and_then(Value::as_bool).unwrap_or(true);
        let args = || -> Result<Vec<Region>> {
            v.get("args")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing args"))?
                .iter()
                .map(|a| Region::from_json(ring, a))
                .collect()
        };
        match op {
            "union" => Ok(Region::Union(args()?)),
            "inter" => Ok(Region::Inter(args()?)),
            "compl" => Ok(Region::from_json(ring, v.get("arg").ok_or_else(|| bad("missing arg"))?)?
                .complement()),
            "disc" => {
                let r2 = rat_field("r2")?;
                if r2.is_negative() {
                    return Err(bad("negative r2"));
                }
                Ok(Region::disc(&k_field("center")?, r2, closed))
            }
            "halfplane" => Ok(Region::halfplane(&k_field("normal")?, &rat_field("offset")?, closed)),
            "poly" => {
                let vs = v
                    .get("vertices")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("missing vertices"))?
                    .iter()
                    .map(|x| kelem_json::from_json(ring, x))
                    .collect::<Result<Vec<_>>>()?;
                Region::convex_polygon(&vs, closed)
            }
            "quadric" => {
                let strict = v.get("strict").and_then(Value::as_bool).unwrap_or(false);
                Ok(Region::leaf(
                    Quadric::new(rat_field("a")?, k_field("b")?, rat_field("c")?),
                    strict,
                ))
            }
            other => Err(bad(&format!("unknown op {other:?}"))),
        }
    }
}

/// The four corners `σ(1+i)/2` of the unit square.
pub fn corners() -> [KElem; 4] {
    let h = |a, b| KElem::from_ints(Ring::Gaussian, a, b, 2);
    [h(1, 1), h(-1, 1), h(-1, -1), h(1, -1)]
}

/// A disc `B(center, √r2)` or, when `r2` is absent, the half-plane it degenerates to.
#[derive(Clone, Debug, PartialEq)]
pub struct Disc {
    pub center: KElem,
    pub r2: BigRational,
    pub closed: bool,
}

impl Disc {
    pub fn new(center: KElem, r2: BigRational, closed: bool) -> Result<Self> {
        if r2.is_negative() {
            return Err(Error::ParameterOutOfRange("negative squared radius".into()));
        }
        Ok(Disc { center, r2, closed })
    }

    fn from_quadric(q: &Quadric, closed: bool) -> Option<Self> {
        if !q.a().is_positive() {
            return None;
        }
        // a|z − m|² − a·r² with m = −b/a
        let m = -&q.b().scale(&q.a().recip());
        let r2 = m.norm() - q.c() / q.a();
        (!r2.is_negative()).then_some(Disc { center: m, r2, closed })
    }

    pub fn to_region(&self) -> Region {
        Region::disc(&self.center, self.r2.clone(), self.closed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "op": "disc",
            "center": self.center.to_exact_string(),
            "r2": fmt_rat(&self.r2),
            "closed": self.closed,
        })
    }
}

/// Image of a disc under `z ↦ 1/z`.
#[derive(Clone, Debug, PartialEq)]
pub enum DiscInverse {
    Disc(Disc),
    /// The complement of the given disc.
    Complement(Disc),
}

impl DiscInverse {
    pub fn to_region(&self) -> Region {
        match self {
            DiscInverse::Disc(d) => d.to_region(),
            DiscInverse::Complement(d) => d.to_region().complement(),
        }
    }
}

/// `B(z, r)^{-1} = B(z̄/A, r/|A|)` with `A = |z|² − r²`, or its complement when `0` is inside.
pub fn invert_disc(d: &Disc) -> Result<DiscInverse> {
    let a = d.center.norm() - &d.r2;
    let center = d.center.conj().scale(&a.recip_checked().ok_or(Error::ZeroOnBoundary)?);
    let r2 = &d.r2 / (&a * &a);
    Ok(match a.cmp(&BigRational::zero()) {
        Ordering::Greater => DiscInverse::Disc(Disc {
            center,
            r2,
            closed: d.closed,
        }),
        _ => DiscInverse::Complement(Disc {
            center,
            r2,
            closed: !d.closed,
        }),
    })
}

trait RecipChecked: Sized {
    fn recip_checked(&self) -> Option<Self>;
}

impl RecipChecked for BigRational {
    fn recip_checked(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

pub fn invert_region(r: &Region) -> Region {
    r.invert()
}

/// Whether `|x|² < r2` for a point given by exact rational Cartesian coordinates.
pub fn rational_norm_lt(x: &BigRational, y: &BigRational, r2: &BigRational) -> bool {
    &(x * x + y * y) < r2
}

/// The Gaussian element `x + iy` for rational `x, y`.
pub fn gaussian_point(x: BigRational, y: BigRational) -> KElem {
    KElem::from_coords(Ring::Gaussian, x, y)
}

/// The `K`-element with Cartesian coordinates `(x, y·√D/2)`, i.e. lattice coordinates
/// `(x − t·y/2, y)`.
pub fn lattice_point(ring: Ring, x: BigRational, y: BigRational) -> KElem {
    let t = BigRational::new(BigInt::from(ring.t()), 2.into());
    KElem::from_coords(ring, x - &t * &y, y)
}
