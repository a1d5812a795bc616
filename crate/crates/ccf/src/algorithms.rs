//! Partial-quotient choice functions: nearest-element algorithms and their variants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::arithmetic::locate::{Locatable, Quadric};
use crate::error::{Error, Result};
use crate::regions::{corners, CheckReport, Region};
use crate::rings::{is_even_gaussian, KElem, Ring, RingElement};
use crate::util::{fmt_rat, parse_rat, rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AlgorithmKind {
    HurwitzNearest,
    EisensteinNearest,
    /// Nearest even Gaussian integer.
    EvenGaussian,
    /// Nearest element of `Λ = {x + iy : |x + y| ∈ {0, 2, 4} or odd ≥ 5}`.
    LambdaGaussian,
    /// Nearest Gaussian integer, with corner discs of radius `r` pushed to the diagonal neighbour.
    PerturbedHurwitz { r: BigRational },
    /// Eisenstein algorithm whose cells far from the origin reach into `a + χH`.
    EisensteinChi { chi: BigRational },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgorithmSpec {
    ring: Ring,
    kind: AlgorithmKind,
}

/// Whether `r` lies in `(0, √2 − √(3/2))`, decided exactly.
pub fn perturbation_in_range(r: &BigRational) -> bool {
    let r2 = r * r;
    let m = rat(1, 2) - &r2;
    r.is_positive() && m.is_positive() && rat(6, 1) * &r2 < &m * &m
}

fn undecided<P: Locatable + ?Sized>(z: &P) -> Error {
    match z.precision_bits() {
        0 => Error::Undecided,
        bits => Error::PrecisionExhausted { bits },
    }
}

fn in_lambda(a: &RingElement) -> bool {
    let s = (&a.a + &a.b).abs();
    match s.to_u64() {
        Some(0 | 2 | 4) => true,
        Some(k) => k >= 5 && k % 2 == 1,
        None => s.is_odd(),
    }
}

/// Ring elements within `reach` of `(x, y)` in floating point, with their squared distances.
fn lattice_near(ring: Ring, (x, y): (f64, f64), reach: f64) -> Vec<(RingElement, f64)> {
    let d = ring.d() as f64;
    let (_, v0) = ring.from_cartesian(x, y);
    let vr = 2.0 * reach / d.sqrt();
    let mut out = Vec::new();
    for b in (v0 - vr).floor() as i64 - 1..=(v0 + vr).ceil() as i64 + 1 {
        let half = ring.t() as f64 * b as f64 / 2.0;
        for a in (x - half - reach).floor() as i64 - 1..=(x - half + reach).ceil() as i64 + 1 {
            let (px, py) = ring.to_cartesian(a as f64, b as f64);
            let d2 = (px - x).powi(2) + (py - y).powi(2);
            if d2 <= reach * reach {
                out.push((RingElement::from_i64(ring, a, b), d2));
            }
        }
    }
    out
}

/// The element of the target set nearest to `z`, ties going to the greatest in `(Re, Im)` order.
pub fn nearest_in<P: Locatable + ?Sized>(
    ring: Ring,
    z: &P,
    pred: impl Fn(&RingElement) -> bool,
) -> Result<RingElement> {
    let p = z.approx();
    let rad = z.approx_radius();
    // a ball this wide straddles several cells; more precision is the only remedy
    if !(p.0.is_finite() && p.1.is_finite() && rad < 1.0) {
        return Err(Error::Undecided);
    }
    let mag = p.0.abs() + p.1.abs();
    let slack = 1e-9 * (1.0 + mag) + 2.0 * rad;
    let cands: Vec<(RingElement, f64)> = lattice_near(ring, p, 1.6 + slack)
        .into_iter()
        .filter(|(a, _)| pred(a))
        .collect();
    let dmin = cands
        .iter()
        .map(|(_, d)| d.sqrt())
        .fold(f64::INFINITY, f64::min);
    if !dmin.is_finite() {
        return Err(Error::Unsupported("no target element within reach".into()));
    }
    let mut contenders = cands
        .into_iter()
        .filter(|(_, d)| d.sqrt() <= dmin + slack + 1e-12)
        .map(|(a, _)| a);
    let mut best = contenders.next().expect("the minimiser is a contender");
    for c in contenders {
        let q = Quadric::bisector(&KElem::from(&best), &KElem::from(&c));
        match z.quadric_sign(&q) {
            Some(Ordering::Less) => {}
            Some(Ordering::Greater) => best = c,
            Some(Ordering::Equal) => {
                if c.lex_cmp(&best) == Ordering::Greater {
                    best = c;
                }
            }
            None => return Err(undecided(z)),
        }
    }
    Ok(best)
}

impl AlgorithmSpec {
    pub fn hurwitz() -> Self {
        AlgorithmSpec {
            ring: Ring::Gaussian,
            kind: AlgorithmKind::HurwitzNearest,
        }
    }

    pub fn eisenstein() -> Self {
        AlgorithmSpec {
            ring: Ring::Eisenstein,
            kind: AlgorithmKind::EisensteinNearest,
        }
    }

    pub fn even() -> Self {
        AlgorithmSpec {
            ring: Ring::Gaussian,
            kind: AlgorithmKind::EvenGaussian,
        }
    }

    pub fn lambda() -> Self {
        AlgorithmSpec {
            ring: Ring::Gaussian,
            kind: AlgorithmKind::LambdaGaussian,
        }
    }

    /// The perturbed Hurwitz algorithm; `r` must lie in `(0, √2 − √(3/2))`.
    pub fn perturbed(r: BigRational) -> Result<Self> {
        if !perturbation_in_range(&r) {
            return Err(Error::ParameterOutOfRange(format!(
                "perturbation radius {} outside (0, √2 − √(3/2))",
                fmt_rat(&r)
            )));
        }
        Ok(Self::perturbed_unchecked(r))
    }

    /// The perturbed rule for any `0 < r < 1/√2`, for probing geometry outside the proven range.
    pub fn perturbed_unchecked(r: BigRational) -> Self {
        assert!(r.is_positive() && &r * &r < rat(1, 2), "corner discs must be disjoint");
        AlgorithmSpec {
            ring: Ring::Gaussian,
            kind: AlgorithmKind::PerturbedHurwitz { r },
        }
    }

    /// The χ-algorithm over the Eisenstein integers; `1 < χ ≤ 5/4`.
    pub fn chi(chi: BigRational) -> Result<Self> {
        if chi <= rat(1, 1) || chi > rat(5, 4) {
            return Err(Error::ParameterOutOfRange(format!(
                "chi = {} outside (1, 5/4]",
                fmt_rat(&chi)
            )));
        }
        Ok(AlgorithmSpec {
            ring: Ring::Eisenstein,
            kind: AlgorithmKind::EisensteinChi { chi },
        })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn kind(&self) -> &AlgorithmKind {
        &self.kind
    }

    /// Command-line name, e.g. `perturbed:r=3/20`.
    pub fn name(&self) -> String {
        match &self.kind {
            AlgorithmKind::HurwitzNearest => "hurwitz".into(),
            AlgorithmKind::EisensteinNearest => "eisenstein".into(),
            AlgorithmKind::EvenGaussian => "even".into(),
            AlgorithmKind::LambdaGaussian => "lambda".into(),
            AlgorithmKind::PerturbedHurwitz { r } => format!("perturbed:r={}", fmt_rat(r)),
            AlgorithmKind::EisensteinChi { chi } => format!("chi:x={}", fmt_rat(chi)),
        }
    }

    /// Whether `sup |z − f(z)| < 1`. Moving a corner point by `2c` costs `|c| + r`.
    pub fn uniformly_contracting(&self) -> bool {
        match &self.kind {
            AlgorithmKind::HurwitzNearest | AlgorithmKind::EisensteinNearest => true,
            AlgorithmKind::EisensteinChi { .. } => true,
            AlgorithmKind::EvenGaussian | AlgorithmKind::LambdaGaussian => false,
            AlgorithmKind::PerturbedHurwitz { r } => {
                let s = rat(1, 1) - r;
                s.is_positive() && &s * &s * rat(2, 1) > rat(1, 1)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"name": self.name(), "ring": self.ring.id()})
    }

    pub fn in_target_set(&self, a: &RingElement) -> bool {
        if a.ring != self.ring {
            return false;
        }
        match self.kind {
            AlgorithmKind::EvenGaussian => is_even_gaussian(a).unwrap_or(false),
            AlgorithmKind::LambdaGaussian => in_lambda(a),
            _ => true,
        }
    }

    /// The partial quotient `f(z)`.
    pub fn choose<P: Locatable + ?Sized>(&self, z: &P) -> Result<RingElement> {
        let ring = self.ring;
        match &self.kind {
            AlgorithmKind::HurwitzNearest | AlgorithmKind::EisensteinNearest => {
                nearest_in(ring, z, |_| true)
            }
            AlgorithmKind::EvenGaussian | AlgorithmKind::LambdaGaussian => {
                nearest_in(ring, z, |a| self.in_target_set(a))
            }
            AlgorithmKind::PerturbedHurwitz { r } => {
                let a0 = nearest_in(ring, z, |_| true)?;
                let k0 = KElem::from(&a0);
                for c in corners() {
                    let q = Quadric::disc(&(&k0 + &c), r * r);
                    match z.quadric_sign(&q) {
                        Some(Ordering::Less) => {
                            let two_c = (&c + &c).to_ring_element().expect("2c is integral");
                            return Ok(&a0 + &two_c);
                        }
                        Some(_) => {}
                        None => return Err(undecided(z)),
                    }
                }
                Ok(a0)
            }
            AlgorithmKind::EisensteinChi { chi } => {
                let a0 = nearest_in(ring, z, |_| true)?;
                if a0.norm() <= BigInt::from(4) {
                    return Ok(a0);
                }
                let mut best: Option<RingElement> = None;
                let reach = 1.0 + 2.0 * z.approx_radius();
                for (a, _) in lattice_near(ring, z.approx(), reach) {
                    match self.chi_admissible(&a, chi).contains(z) {
                        Some(true) => {
                            if best.as_ref().is_none_or(|b| a.lex_cmp(b) == Ordering::Greater) {
                                best = Some(a);
                            }
                        }
                        Some(false) => {}
                        None => return Err(undecided(z)),
                    }
                }
                best.ok_or_else(|| undecided(z))
            }
        }
    }

    fn chi_admissible(&self, a: &RingElement, chi: &BigRational) -> Region {
        let scale = if a.norm() > BigInt::from(4) {
            chi.clone()
        } else {
            rat(1, 1)
        };
        Region::hexagon_h(&scale).translate(&KElem::from(a))
    }

    /// The fundamental set `F`, containing `z − f(z)` for every `z`.
    pub fn fundamental_set(&self) -> Region {
        match &self.kind {
            AlgorithmKind::HurwitzNearest => Region::square_s(),
            AlgorithmKind::EisensteinNearest => Region::hexagon_h(&rat(1, 1)),
            AlgorithmKind::EvenGaussian | AlgorithmKind::LambdaGaussian => Region::diamond_h(),
            AlgorithmKind::PerturbedHurwitz { r } => Region::corner_set(r),
            AlgorithmKind::EisensteinChi { chi } => Region::hexagon_h(chi),
        }
    }

    /// Voronoi cell of `a` inside the target set, with the tie-break built into the edges.
    fn nearest_cell(&self, a: &RingElement, pred: impl Fn(&RingElement) -> bool) -> Region {
        let ka = KElem::from(a);
        let sides = self
            .ring
            .elements_of_norm_at_most(9)
            .into_iter()
            .map(|d| a + &d)
            .filter(|b| b != a && pred(b))
            .map(|b| {
                let strict = b.lex_cmp(a) == Ordering::Greater;
                Region::leaf(Quadric::bisector(&ka, &KElem::from(&b)), strict)
            })
            .collect();
        Region::Inter(sides)
    }

    /// `f^{-1}(a)`.
    pub fn cell(&self, a: &RingElement) -> Result<Region> {
        if !self.in_target_set(a) {
            return Err(Error::NotInTargetSet);
        }
        let all = |_: &RingElement| true;
        Ok(match &self.kind {
            AlgorithmKind::HurwitzNearest | AlgorithmKind::EisensteinNearest => {
                self.nearest_cell(a, all)
            }
            AlgorithmKind::EvenGaussian | AlgorithmKind::LambdaGaussian => {
                self.nearest_cell(a, |b| self.in_target_set(b))
            }
            AlgorithmKind::PerturbedHurwitz { r } => {
                let ka = KElem::from(a);
                let r2 = r * r;
                let kept = self.nearest_cell(a, all).minus(Region::Union(
                    corners()
                        .iter()
                        .map(|c| Region::disc(&(&ka + c), r2.clone(), false))
                        .collect(),
                ));
                let mut parts = vec![kept];
                for c in corners() {
                    let src = (&ka - &(&c + &c)).to_ring_element().expect("integral");
                    parts.push(Region::Inter(vec![
                        Region::disc(&(&ka - &c), r2.clone(), false),
                        self.nearest_cell(&src, all),
                    ]));
                }
                Region::Union(parts)
            }
            AlgorithmKind::EisensteinChi { chi } => {
                let four = BigInt::from(4);
                let near: Vec<RingElement> = self
                    .ring
                    .elements_of_norm_at_most(4)
                    .into_iter()
                    .map(|d| a + &d)
                    .collect();
                let far_cells = Region::Union(
                    near.iter()
                        .filter(|b| b.norm() > four)
                        .map(|b| self.nearest_cell(b, all))
                        .collect(),
                );
                let mut chosen = vec![far_cells, self.chi_admissible(a, chi)];
                for b in near.iter().filter(|b| b.lex_cmp(a) == Ordering::Greater) {
                    chosen.push(self.chi_admissible(b, chi).complement());
                }
                let mut parts = vec![Region::Inter(chosen)];
                if a.norm() <= four {
                    parts.push(self.nearest_cell(a, all));
                }
                Region::Union(parts)
            }
        })
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    /// `hurwitz | eisenstein | even | lambda | perturbed[:r=…] | chi[:x=…]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, param) = match s.split_once(':') {
            Some((h, p)) => (h, Some(p)),
            None => (s, None),
        };
        let value = |key: &str, default: BigRational| -> Result<BigRational> {
            match param {
                None => Ok(default),
                Some(p) => {
                    let v = p
                        .strip_prefix(key)
                        .and_then(|r| r.strip_prefix('='))
                        .unwrap_or(p);
                    parse_rat(v)
                }
            }
        };
        match head {
            "hurwitz" => Ok(Self::hurwitz()),
            "eisenstein" => Ok(Self::eisenstein()),
            "even" => Ok(Self::even()),
            "lambda" => Ok(Self::lambda()),
            "perturbed" => Self::perturbed(value("r", rat(3, 20))?),
            "chi" => Self::chi(value("x", rat(5, 4))?),
            other => Err(Error::Parse(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Lattice points `(u + v·g)` with `u, v ∈ mesh⁻¹·Z` inside a Cartesian box.
pub fn lattice_grid(ring: Ring, center: (f64, f64), half: f64, mesh: i64) -> Vec<KElem> {
    let d = ring.d() as f64;
    let (cu, cv) = ring.from_cartesian(center.0, center.1);
    let vr = 2.0 * half / d.sqrt();
    let vlo = ((cv - vr) * mesh as f64).floor() as i64;
    let vhi = ((cv + vr) * mesh as f64).ceil() as i64;
    let mut out = Vec::new();
    for b in vlo..=vhi {
        let v = b as f64 / mesh as f64;
        let shift = ring.t() as f64 * v / 2.0;
        let ulo = ((cu + (cv - v) * ring.t() as f64 / 2.0 - half - shift.abs()) * mesh as f64).floor() as i64 - 1;
        let uhi = ((cu + (cv - v) * ring.t() as f64 / 2.0 + half + shift.abs()) * mesh as f64).ceil() as i64 + 1;
        for a in ulo..=uhi {
            let (x, y) = ring.to_cartesian(a as f64 / mesh as f64, v);
            if (x - center.0).abs() <= half && (y - center.1).abs() <= half {
                out.push(KElem::from_ints(ring, a, b, mesh));
            }
        }
    }
    out
}

/// Checks that no unit can occur as a partial quotient after the first step:
/// `f^{-1}(u) ∩ F^{-1} = ∅` for every `|u| = 1`, sampled on a lattice grid.
pub fn validate_no_unit_quotients(alg: &AlgorithmSpec, mesh: i64) -> CheckReport {
    let name = "no unit partial quotients";
    let units: Vec<RingElement> = alg
        .ring
        .units()
        .into_iter()
        .filter(|u| alg.in_target_set(u))
        .collect();
    if units.is_empty() {
        return CheckReport::vacuous(name, "no unit lies in the target set");
    }
    let f = alg.fundamental_set();
    let finv = f.invert();
    let base = lattice_grid(alg.ring, (0.0, 0.0), 1.0, mesh);
    let mut samples = 0usize;
    for u in &units {
        let ku = KElem::from(u);
        let pts: Vec<KElem> = base
            .iter()
            .filter(|x| f.contains_f64(x.approx()) || f.contains(*x) != Some(false))
            .map(|x| x + &ku)
            .collect();
        samples += pts.len();
        let witness = pts.par_iter().find_any(|z| {
            alg.choose(*z).ok().as_ref() == Some(u) && finv.contains(*z) == Some(true)
        });
        if let Some(z) = witness {
            return CheckReport::fail(
                name,
                samples,
                mesh,
                json!({"z": z.to_exact_string(), "unit": u.to_string()}),
            );
        }
    }
    CheckReport::pass_sampled(name, samples, mesh)
}

/// Approximate squared distance helper used by callers that report margins.
pub fn abs2_f64(k: &KElem) -> f64 {
    let (x, y) = k.approx();
    x * x + y * y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::surd::{Branch, QuadraticSurd};

    fn g(a: i64, b: i64) -> RingElement {
        RingElement::from_i64(Ring::Gaussian, a, b)
    }

    fn i_sqrt2() -> QuadraticSurd {
        QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(2, 0), Branch::PositiveImaginary).unwrap()
    }

    #[test]
    fn choose_examples() {
        let z = i_sqrt2();
        assert_eq!(AlgorithmSpec::hurwitz().choose(&z).unwrap(), g(0, 1));
        assert_eq!(AlgorithmSpec::even().choose(&z).unwrap(), g(0, 2));
        let w = z.step(&g(0, 2));
        assert_eq!(AlgorithmSpec::even().choose(&w).unwrap(), g(0, 2));
        let p = KElem::from_ints(Ring::Gaussian, 24, 21, 10);
        assert_eq!(AlgorithmSpec::lambda().choose(&p).unwrap(), g(2, 2));
    }

    #[test]
    fn ties_go_to_lex_greatest() {
        let h = AlgorithmSpec::hurwitz();
        let half = KElem::from_ints(Ring::Gaussian, 1, 1, 2);
        assert_eq!(h.choose(&half).unwrap(), g(1, 1));
        let m = KElem::from_ints(Ring::Gaussian, -1, -1, 2);
        assert_eq!(h.choose(&m).unwrap(), g(0, 0));
    }

    #[test]
    fn lambda_membership() {
        assert!(in_lambda(&g(2, 2)));
        assert!(!in_lambda(&g(3, 3)));
        assert!(in_lambda(&g(3, 2)));
        assert!(!in_lambda(&g(2, 1)));
        assert!(in_lambda(&g(0, 0)));
    }

    #[test]
    fn parameter_validation() {
        assert!(AlgorithmSpec::perturbed(rat(3, 20)).is_ok());
        assert!(AlgorithmSpec::perturbed(rat(19, 100)).is_err());
        assert!(AlgorithmSpec::perturbed(rat(18, 100)).is_ok());
        assert!(AlgorithmSpec::chi(rat(5, 4)).is_ok());
        assert!(AlgorithmSpec::chi(rat(1, 1)).is_err());
        assert!(AlgorithmSpec::chi(rat(13, 10)).is_err());
        assert_eq!("perturbed:r=0.15".parse::<AlgorithmSpec>().unwrap().name(), "perturbed:r=3/20");
        assert_eq!("chi:x=5/4".parse::<AlgorithmSpec>().unwrap().name(), "chi:x=5/4");
        assert!("nearest".parse::<AlgorithmSpec>().is_err());
    }

    #[test]
    fn perturbed_moves_corner_points() {
        let alg = AlgorithmSpec::perturbed(rat(3, 20)).unwrap();
        // 0.45 + 0.45i is within 0.15 of the corner (1+i)/2 of the cell of 0
        let z = KElem::from_ints(Ring::Gaussian, 9, 9, 20);
        assert_eq!(alg.choose(&z).unwrap(), g(1, 1));
        let z = KElem::from_ints(Ring::Gaussian, 3, 1, 10);
        assert_eq!(alg.choose(&z).unwrap(), g(0, 0));
    }

    #[test]
    fn cells_agree_with_choose() {
        let algs = [
            AlgorithmSpec::hurwitz(),
            AlgorithmSpec::even(),
            AlgorithmSpec::lambda(),
            AlgorithmSpec::perturbed(rat(3, 20)).unwrap(),
            AlgorithmSpec::eisenstein(),
            AlgorithmSpec::chi(rat(5, 4)).unwrap(),
        ];
        for alg in &algs {
            let ring = alg.ring();
            let pts = lattice_grid(ring, (1.3, 1.1), 2.0, 8);
            let targets: Vec<RingElement> = ring
                .elements_of_norm_at_most(25)
                .into_iter()
                .filter(|a| alg.in_target_set(a))
                .collect();
            let cells: Vec<(RingElement, Region)> =
                targets.iter().map(|a| (a.clone(), alg.cell(a).unwrap())).collect();
            let f = alg.fundamental_set();
            for z in &pts {
                let a = alg.choose(z).unwrap();
                assert!(alg.in_target_set(&a));
                let w = z - &KElem::from(&a);
                assert!(abs2_f64(&w) <= 1.0 + 1e-12, "{alg} {z}");
                assert_eq!(f.contains(&w), Some(true), "{alg} {z} ↦ {a}");
                for (b, cell) in &cells {
                    assert_eq!(cell.contains(z), Some(b == &a), "{alg} z = {z}, a = {a}, b = {b}");
                }
            }
        }
    }

    #[test]
    fn cell_errors() {
        assert_eq!(AlgorithmSpec::even().cell(&g(1, 0)), Err(Error::NotInTargetSet));
    }

    #[test]
    fn unit_quotients_excluded() {
        let r = validate_no_unit_quotients(&AlgorithmSpec::even(), 16);
        assert!(r.passed && r.mode == crate::regions::SampleMode::Vacuous);
        let r = validate_no_unit_quotients(&AlgorithmSpec::chi(rat(5, 4)).unwrap(), 16);
        assert!(r.passed, "{r:?}");
        let r = validate_no_unit_quotients(&AlgorithmSpec::perturbed(rat(3, 20)).unwrap(), 16);
        assert!(r.passed, "{r:?}");
    }
}
