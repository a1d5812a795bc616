//! σ-symmetric binary forms, their transport `X ↦ (gᵗ)^σ X g` along an expansion,
//! Hermitian root loci and bounds on partial quotients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use crate::arithmetic::{BallComplex, LElem, Real2};
use crate::error::{Error, Result};
use crate::expansion::{check_monotone, ExpansionTrace, Iterate, TraceValue};
use crate::rings::{KElem, Ring, RingElement};
use crate::util::{fmt_rat, lcm_all, rat, rat_to_f64};

/// The map applied to the left argument of a form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sigma {
    Identity,
    Conjugation,
}

impl Sigma {
    pub fn apply(self, x: &KElem) -> KElem {
        match self {
            Sigma::Identity => x.clone(),
            Sigma::Conjugation => x.conj(),
        }
    }

    fn apply_ring(self, x: &RingElement) -> RingElement {
        match self {
            Sigma::Identity => x.clone(),
            Sigma::Conjugation => x.conj(),
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sigma::Identity => "identity",
            Sigma::Conjugation => "conjugation",
        })
    }
}

/// `f(ξ, η) = Aξ^σξ + Bξ^ση + Cη^σξ + Dη^ση` for the matrix `[[A, B], [C, D]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SigmaForm {
    sigma: Sigma,
    entries: [KElem; 4],
}

/// `g_n = [[p_n, p_{n−1}], [q_n, q_{n−1}]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GMatrix {
    pub p: RingElement,
    pub p_prev: RingElement,
    pub q: RingElement,
    pub q_prev: RingElement,
}

impl GMatrix {
    pub fn from_trace(trace: &ExpansionTrace, n: usize) -> Self {
        let n = n as isize;
        GMatrix {
            p: trace.p(n),
            p_prev: trace.p(n - 1),
            q: trace.q(n),
            q_prev: trace.q(n - 1),
        }
    }

    pub fn det(&self) -> RingElement {
        &(&self.p * &self.q_prev) - &(&self.p_prev * &self.q)
    }
}

impl SigmaForm {
    pub fn new(sigma: Sigma, entries: [KElem; 4]) -> Result<Self> {
        let ring = entries[0].ring();
        if let Some(e) = entries.iter().find(|e| e.ring() != ring) {
            return Err(Error::RingMismatch(ring, e.ring()));
        }
        Ok(SigmaForm { sigma, entries })
    }

    /// A σ-symmetric form: `C = B^σ`, and `A`, `D` real under conjugation.
    pub fn symmetric(sigma: Sigma, a: KElem, b: KElem, d: KElem) -> Result<Self> {
        let c = sigma.apply(&b);
        let f = SigmaForm::new(sigma, [a, b, c, d])?;
        if !f.is_symmetric() {
            return Err(Error::ParameterOutOfRange("diagonal entries of a Hermitian form must be real".into()));
        }
        Ok(f)
    }

    /// `[[a, b/2], [b/2, c]]` with `σ = id`, whose form is `aξ² + bξη + cη²`.
    pub fn from_polynomial(a: &RingElement, b: &RingElement, c: &RingElement) -> Result<Self> {
        let half = KElem::from(b).scale(&rat(1, 2));
        SigmaForm::symmetric(Sigma::Identity, a.into(), half, c.into())
    }

    /// `[[a, b], [b̄, c]]` with `σ` = conjugation: `P(z) = a z z̄ + b z̄ + b̄ z + c`.
    pub fn hermitian(a: &BigRational, b: &KElem, c: &BigRational) -> Result<Self> {
        let ring = b.ring();
        SigmaForm::symmetric(
            Sigma::Conjugation,
            KElem::from_rational(ring, a),
            b.clone(),
            KElem::from_rational(ring, c),
        )
    }

    pub fn sigma(&self) -> Sigma {
        self.sigma
    }

    pub fn ring(&self) -> Ring {
        self.entries[0].ring()
    }

    /// `[A, B, C, D]`.
    pub fn entries(&self) -> &[KElem; 4] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        let [a, b, c, d] = &self.entries;
        *c == self.sigma.apply(b) && self.sigma.apply(a) == *a && self.sigma.apply(d) == *d
    }

    /// Least `k ≥ 1` with `kX` integral.
    pub fn k(&self) -> BigInt {
        lcm_all(self.entries.iter().map(|e| e.denom()))
    }

    pub fn det(&self) -> KElem {
        let [a, b, c, d] = &self.entries;
        &(a * d) - &(b * c)
    }

    pub fn eval(&self, xi: &KElem, eta: &KElem) -> KElem {
        let [a, b, c, d] = &self.entries;
        let (xs, es) = (self.sigma.apply(xi), self.sigma.apply(eta));
        &(&(&(a * &(&xs * xi)) + &(b * &(&xs * eta))) + &(c * &(&es * xi))) + &(d * &(&es * eta))
    }

    pub fn eval_ring(&self, xi: &RingElement, eta: &RingElement) -> KElem {
        self.eval(&xi.into(), &eta.into())
    }

    /// `(gᵗ)^σ X g`.
    pub fn act(&self, g: &GMatrix) -> SigmaForm {
        let s = self.sigma;
        let [a, b, c, d] = &self.entries;
        let k = |x: &RingElement| KElem::from(x);
        let (p, pp, q, qp) = (k(&g.p), k(&g.p_prev), k(&g.q), k(&g.q_prev));
        // X g
        let xg = [
            &(a * &p) + &(b * &q),
            &(a * &pp) + &(b * &qp),
            &(c * &p) + &(d * &q),
            &(c * &pp) + &(d * &qp),
        ];
        let (ps, pps, qs, qps) = (
            k(&s.apply_ring(&g.p)),
            k(&s.apply_ring(&g.p_prev)),
            k(&s.apply_ring(&g.q)),
            k(&s.apply_ring(&g.q_prev)),
        );
        SigmaForm {
            sigma: s,
            entries: [
                &(&ps * &xg[0]) + &(&qs * &xg[2]),
                &(&ps * &xg[1]) + &(&qs * &xg[3]),
                &(&pps * &xg[0]) + &(&qps * &xg[2]),
                &(&pps * &xg[1]) + &(&qps * &xg[3]),
            ],
        }
    }

    /// `f(ζ, 1)` at a surd, exactly; conjugation forms must be symmetric.
    pub fn is_zero_at(&self, z: &LElem) -> Result<bool> {
        let [a, b, c, d] = &self.entries;
        match self.sigma {
            Sigma::Identity => {
                let v = z.mul(z).mul_k(a).add(&z.mul_k(&(b + c))).add_k(d);
                Ok(v.is_zero())
            }
            Sigma::Conjugation => {
                if !self.is_symmetric() {
                    return Err(Error::Unsupported("exact evaluation of a non-Hermitian conjugation form".into()));
                }
                // A|ζ|² + 2 Re(Cζ) + D
                let v = z.abs2().scale(&a.re()).add(&re_part(&z.mul_k(c)).scale(&rat(2, 1))).add_rat(&d.re());
                Ok(v.is_zero())
            }
        }
    }

    /// `f(ζ, 1)` enclosed.
    pub fn eval_ball(&self, z: &BallComplex) -> BallComplex {
        let prec = z.precision();
        let [a, b, c, d] = &self.entries;
        let kb = |x: &KElem| BallComplex::from_kelem(x, prec);
        let zs = match self.sigma {
            Sigma::Identity => z.clone(),
            Sigma::Conjugation => z.conj(),
        };
        kb(a).mul(&zs).mul(z).add(&kb(b).mul(&zs)).add(&kb(c).mul(z)).add(&kb(d))
    }

    /// `f(ζ, 1) = 0` when `ζ` is exact, `0 ∈ f(ζ, 1)` for balls.
    pub fn vanishes_at(&self, z: &Iterate) -> Result<bool> {
        match z {
            Iterate::Surd(s) => self.is_zero_at(s.as_lelem()),
            Iterate::Ball(b) => Ok(self.eval_ball(b).contains_zero()),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sigma": self.sigma,
            "k": self.k().to_string(),
            "entries": self.entries.iter().map(|e| e.to_exact_string()).collect::<Vec<_>>(),
        })
    }

    fn max_entry_abs(&self) -> f64 {
        self.entries.iter().map(|e| rat_to_f64(&e.norm()).sqrt()).fold(0.0, f64::max)
    }
}

impl fmt::Display for SigmaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "[[{a}, {b}], [{c}, {d}]] ({})", self.sigma)
    }
}

fn re_part(l: &LElem) -> Real2 {
    let (u, v) = l.coords();
    u.add(&v.scale(&rat(l.ring().t(), 2)))
}

/// Zero set of `P(z) = a z z̄ + b z̄ + b̄ z + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HermitianLocus {
    /// `|z − center|² = r2`.
    Circle { center: KElem, r2: BigRational },
    DegeneratePoint(KElem),
    /// `Re(b̄ z) = offset`.
    Line { normal: KElem, offset: BigRational },
    Empty,
    Plane,
}

impl HermitianLocus {
    pub fn to_json(&self) -> Value {
        match self {
            HermitianLocus::Circle { center, r2 } => {
                json!({"kind": "circle", "center": center.to_exact_string(), "radius_squared": fmt_rat(r2)})
            }
            HermitianLocus::DegeneratePoint(p) => json!({"kind": "point", "point": p.to_exact_string()}),
            HermitianLocus::Line { normal, offset } => {
                json!({"kind": "line", "normal": normal.to_exact_string(), "offset": fmt_rat(offset)})
            }
            HermitianLocus::Empty => json!({"kind": "empty"}),
            HermitianLocus::Plane => json!({"kind": "plane"}),
        }
    }

    /// `sup |z|` over the locus when bounded.
    pub fn abs_bound(&self) -> Option<f64> {
        match self {
            HermitianLocus::Circle { center, r2 } => {
                Some(rat_to_f64(&center.norm()).sqrt() + rat_to_f64(r2).sqrt())
            }
            HermitianLocus::DegeneratePoint(p) => Some(rat_to_f64(&p.norm()).sqrt()),
            HermitianLocus::Empty => Some(0.0),
            _ => None,
        }
    }
}

/// Completing the square: `|z + b/a|² = (|b|² − ac)/a²`.
pub fn hermitian_roots(x: &SigmaForm) -> Result<HermitianLocus> {
    if x.sigma != Sigma::Conjugation || !x.is_symmetric() {
        return Err(Error::Unsupported("root loci are defined for Hermitian forms".into()));
    }
    let [a, b, _, c] = x.entries();
    let (a, c) = (a.re(), c.re());
    if a.is_zero() {
        return Ok(if !b.is_zero() {
            HermitianLocus::Line {
                normal: b.clone(),
                offset: -c / rat(2, 1),
            }
        } else if c.is_zero() {
            HermitianLocus::Plane
        } else {
            HermitianLocus::Empty
        });
    }
    let center = (-b).scale(&a.recip());
    let r2 = (b.norm() - &a * &c) / (&a * &a);
    Ok(match r2.cmp(&BigRational::zero()) {
        Ordering::Less => HermitianLocus::Empty,
        Ordering::Equal => HermitianLocus::DegeneratePoint(center),
        Ordering::Greater => HermitianLocus::Circle { center, r2 },
    })
}

/// The explicit entry bound along a neat subset with `sup |δ_n| = M`.
#[derive(Clone, Debug, Serialize)]
pub struct EntryBound {
    pub m: f64,
    pub a_bound: f64,
    pub d_bound: f64,
    pub b_bound: f64,
}

impl EntryBound {
    pub fn max(&self) -> f64 {
        self.a_bound.max(self.d_bound).max(self.b_bound)
    }
}

const SLACK: f64 = 1e-9;

fn up(x: f64) -> f64 {
    x * (1.0 + SLACK) + SLACK
}

fn abs_k(x: &KElem) -> f64 {
    rat_to_f64(&x.norm()).sqrt()
}

/// `|A_n| ≤ (2|A||z| + |B| + |C|)M + |A|M²`, the same with `M + 1` for `D_n` (and `|D_0| = |A|`),
/// and `|B_n|² ≤ |A_n||D_n| + |det X|`.
pub fn entry_bound(x: &SigmaForm, z_abs: f64, m: f64) -> EntryBound {
    let [a, b, c, _] = x.entries();
    let (aa, ab, ac) = (abs_k(a), abs_k(b), abs_k(c));
    let lin = 2.0 * aa * z_abs + ab + ac;
    let f = |m: f64| up(lin * m + aa * m * m);
    let a_bound = f(m);
    let d_bound = f(m + 1.0).max(up(aa));
    let b_bound = up((a_bound * d_bound + abs_k(&x.det())).sqrt());
    EntryBound {
        m,
        a_bound,
        d_bound,
        b_bound,
    }
}

#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub indices: Vec<usize>,
    /// Distinct transformed forms in order of first appearance.
    pub forms: Vec<SigmaForm>,
    pub last_new_index: Option<usize>,
    pub max_entry_abs: f64,
    pub bound: EntryBound,
    pub within_bound: bool,
    pub det_preserved: bool,
    /// `A_n = f(p_n, q_n)` and `D_n = f(p_{n−1}, q_{n−1})`.
    pub corner_entries: bool,
    /// `f_n(z_{n+1}, 1) = 0` at every index.
    pub zeros_transported: bool,
}

impl OrbitReport {
    pub fn cardinality(&self) -> usize {
        self.forms.len()
    }

    pub fn passed(&self) -> bool {
        self.within_bound && self.det_preserved && self.corner_entries && self.zeros_transported
    }

    pub fn to_json(&self) -> Value {
        json!({
            "indices": self.indices.len(),
            "cardinality": self.cardinality(),
            "last_new_index": self.last_new_index,
            "forms": self.forms.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
            "max_entry_abs": self.max_entry_abs,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "det_preserved": self.det_preserved,
            "corner_entries": self.corner_entries,
            "zeros_transported": self.zeros_transported,
            "passed": self.passed(),
        })
    }
}

/// Upper bound for `|δ_n|`.
fn delta_abs_upper(trace: &ExpansionTrace, n: usize) -> f64 {
    match trace.delta(n) {
        Some(TraceValue::Exact(d)) => up(d.abs2().to_f64().sqrt()),
        Some(TraceValue::Ball(b)) => up(b.abs2_interval().to_finterval().hi.sqrt()),
        None => f64::INFINITY,
    }
}

fn z_abs_upper(z: &Iterate) -> f64 {
    match z {
        Iterate::Surd(s) => up(s.as_lelem().abs2().to_f64().sqrt()),
        Iterate::Ball(b) => up(b.abs_upper()),
    }
}

/// Default index set: all `n` with `|q_{n−1}| ≤ |q_n|`.
fn default_indices(trace: &ExpansionTrace) -> Vec<usize> {
    let norms = trace.q_norms();
    (0..trace.len()).filter(|&n| n == 0 || norms[n - 1] <= norms[n]).collect()
}

/// Transports `X` along `g_n` for `n ∈ N` and compares the orbit with the explicit bound.
pub fn orbit_along(trace: &ExpansionTrace, x: &SigmaForm, subset: Option<&[usize]>) -> Result<OrbitReport> {
    let z = trace
        .z0()
        .ok_or_else(|| Error::Unsupported("orbits need a trace with iterates".into()))?;
    if x.ring() != trace.ring {
        return Err(Error::RingMismatch(trace.ring, x.ring()));
    }
    if !x.vanishes_at(z)? {
        return Err(Error::NotAZero);
    }
    let indices: Vec<usize> = match subset {
        Some(s) => s.iter().copied().filter(|&n| n < trace.len()).collect(),
        None => default_indices(trace),
    };
    let det = x.det();
    let m = indices.iter().map(|&n| delta_abs_upper(trace, n)).fold(0.0, f64::max);
    let bound = entry_bound(x, z_abs_upper(z), m);
    let mut seen = HashSet::new();
    let mut forms = Vec::new();
    let mut last_new_index = None;
    let (mut det_preserved, mut corner_entries, mut zeros_transported) = (true, true, true);
    let mut max_entry_abs = 0f64;
    for &n in &indices {
        let g = GMatrix::from_trace(trace, n);
        let xn = x.act(&g);
        det_preserved &= xn.det() == det;
        corner_entries &= xn.entries[0] == x.eval_ring(&g.p, &g.q) && xn.entries[3] == x.eval_ring(&g.p_prev, &g.q_prev);
        if let Some(zn1) = trace.z(n + 1) {
            zeros_transported &= xn.vanishes_at(&zn1)?;
        }
        max_entry_abs = max_entry_abs.max(xn.max_entry_abs());
        if seen.insert(xn.clone()) {
            forms.push(xn);
            last_new_index = Some(n);
        }
    }
    Ok(OrbitReport {
        indices,
        forms,
        last_new_index,
        max_entry_abs,
        within_bound: max_entry_abs <= bound.max(),
        bound,
        det_preserved,
        corner_entries,
        zeros_transported,
    })
}

/// Both sides of the zero transport at one index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroCorrespondence {
    pub n: usize,
    pub f_zero: bool,
    pub f_n_zero: bool,
}

impl ZeroCorrespondence {
    pub fn holds(&self) -> bool {
        self.f_zero == self.f_n_zero
    }
}

/// `f(z, 1) = 0 ⇔ f_n(z_{n+1}, 1) = 0`, exactly.
pub fn zero_correspondence(trace: &ExpansionTrace, x: &SigmaForm, n: usize) -> Result<ZeroCorrespondence> {
    let (Some(Iterate::Surd(z)), Some(Iterate::Surd(zn1))) = (trace.z(0), trace.z(n + 1)) else {
        return Err(Error::Unsupported("zero correspondence needs an exact trace".into()));
    };
    if n >= trace.len() {
        return Err(Error::ParameterOutOfRange(format!("n = {n} beyond the trace")));
    }
    let xn = x.act(&GMatrix::from_trace(trace, n));
    Ok(ZeroCorrespondence {
        n,
        f_zero: x.is_zero_at(z.as_lelem())?,
        f_n_zero: xn.is_zero_at(zn1.as_lelem())?,
    })
}

/// Result of bounding `sup |a_n|` for a zero of a Hermitian form.
#[derive(Clone, Debug)]
pub struct QuotientBound {
    /// `n` with `P(p_n/q_n) = 0`.
    pub root_hits: Vec<usize>,
    pub lambda: f64,
    /// Largest `sup |ζ|` over the circles of the orbit forms on `N`.
    pub circle_sup: f64,
    /// `max(λ, circle_sup) + 2`, also covering `|a_0| ≤ |z| + 1`.
    pub bound: f64,
    /// The same assembled only from `X` and `sup |δ_n|` on `N`.
    pub a_priori_bound: f64,
    pub observed_sup: f64,
    pub orbit_size: usize,
}

impl QuotientBound {
    pub fn holds(&self) -> bool {
        self.observed_sup <= self.bound && self.bound <= self.a_priori_bound.max(self.bound)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "root_hits": self.root_hits,
            "lambda": self.lambda,
            "circle_sup": self.circle_sup,
            "bound": self.bound,
            "a_priori_bound": self.a_priori_bound,
            "observed_sup": self.observed_sup,
            "orbit_size": self.orbit_size,
            "holds": self.holds(),
        })
    }
}

pub const LAMBDA: f64 = 2.0;

/// Bounds the partial quotients of a zero of an integral Hermitian form, or reports
/// convergents lying on the locus.
pub fn quotient_bound_from_orbit(trace: &ExpansionTrace, x: &SigmaForm) -> Result<QuotientBound> {
    if x.sigma != Sigma::Conjugation || !x.is_symmetric() || !x.k().is_one() {
        return Err(Error::ParameterOutOfRange("an integral Hermitian form is required".into()));
    }
    let mono = check_monotone(trace);
    if let Some(v) = mono.violation.as_ref().filter(|_| !mono.nonstrict()) {
        return Err(Error::MonotonicityRequired(v.m));
    }
    let z = trace
        .z0()
        .ok_or_else(|| Error::Unsupported("bounds need a trace with iterates".into()))?;
    if !x.vanishes_at(z)? {
        return Err(Error::NotAZero);
    }
    let mut root_hits = Vec::new();
    let mut forms: Vec<(usize, SigmaForm)> = Vec::new();
    for n in 0..trace.len() {
        let g = GMatrix::from_trace(trace, n);
        if x.eval_ring(&g.p, &g.q).is_zero() {
            root_hits.push(n);
        }
        forms.push((n, x.act(&g)));
    }
    let start = root_hits.last().map_or(0, |&n| n + 1);
    let mut circle_sup = 0f64;
    let mut distinct = HashSet::new();
    let mut m = 0f64;
    for (n, xn) in forms.iter().skip(start) {
        let Some(zn1) = trace.z(n + 1) else { continue };
        if z_abs_upper(&zn1) <= LAMBDA {
            continue;
        }
        m = m.max(delta_abs_upper(trace, *n));
        if distinct.insert(xn.clone()) {
            let r = hermitian_roots(xn)?.abs_bound().unwrap_or(f64::INFINITY);
            circle_sup = circle_sup.max(up(r));
        }
    }
    let z_abs = z_abs_upper(z);
    let head = trace.steps[..start.min(trace.len())]
        .iter()
        .skip(1)
        .map(|s| up(abs_k(&KElem::from(&s.a))))
        .fold(0.0, f64::max);
    let tail = LAMBDA.max(circle_sup) + 2.0;
    let bound = tail.max(z_abs + 1.0).max(head);
    // a priori: |A_n| ≥ 1 on N, so the circle of f_n lies in |ζ| ≤ |B_n| + √(|B_n|² + |A_n||D_n|)
    let eb = entry_bound(x, z_abs, m);
    let apriori_r = eb.b_bound + (eb.b_bound * eb.b_bound + eb.a_bound * eb.d_bound).sqrt();
    let a_priori_bound = (LAMBDA.max(up(apriori_r)) + 2.0).max(z_abs + 1.0).max(head);
    let observed_sup = trace.steps.iter().map(|s| abs_k(&KElem::from(&s.a))).fold(0.0, f64::max);
    Ok(QuotientBound {
        root_hits,
        lambda: LAMBDA,
        circle_sup,
        bound,
        a_priori_bound,
        observed_sup,
        orbit_size: distinct.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AlgorithmSpec;
    use crate::arithmetic::{Branch, QuadraticSurd};
    use crate::expansion::run;

    fn g(a: i64, b: i64) -> RingElement {
        RingElement::from_i64(Ring::Gaussian, a, b)
    }

    fn k(a: i64, b: i64) -> KElem {
        KElem::from(&g(a, b))
    }

    fn i_sqrt2() -> QuadraticSurd {
        QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(2, 0), Branch::PositiveImaginary).unwrap()
    }

    #[test]
    fn act_example() {
        let x = SigmaForm::from_polynomial(&g(1, 0), &g(0, 0), &g(2, 0)).unwrap();
        let gm = GMatrix {
            p: g(3, 0),
            p_prev: g(0, 1),
            q: g(0, -2),
            q_prev: g(1, 0),
        };
        let y = x.act(&gm);
        assert_eq!(y.entries(), &[k(1, 0), k(0, -1), k(0, -1), k(1, 0)]);
        assert_eq!(y.det(), x.det());
        let id = GMatrix {
            p: g(1, 0),
            p_prev: g(0, 0),
            q: g(0, 0),
            q_prev: g(1, 0),
        };
        assert_eq!(x.act(&id), x);
        let h = SigmaForm::hermitian(&rat(1, 1), &k(0, 0), &rat(-2, 1)).unwrap();
        let real = GMatrix {
            p: g(2, 0),
            p_prev: g(1, 0),
            q: g(1, 0),
            q_prev: g(1, 0),
        };
        let hy = h.act(&real);
        assert!(hy.entries()[0].is_real() && hy.entries()[3].is_real() && hy.is_symmetric());
    }

    #[test]
    fn zero_correspondence_on_golden_trace() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 6).unwrap();
        let x = SigmaForm::from_polynomial(&g(1, 0), &g(0, 0), &g(2, 0)).unwrap();
        for n in 0..5 {
            let c = zero_correspondence(&t, &x, n).unwrap();
            assert!(c.f_zero && c.f_n_zero);
        }
        let y = SigmaForm::from_polynomial(&g(1, 0), &g(0, 0), &g(3, 0)).unwrap();
        let c = zero_correspondence(&t, &y, 1).unwrap();
        assert!(!c.f_zero && !c.f_n_zero && c.holds());
    }

    #[test]
    fn orbit_is_finite() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 50).unwrap();
        let x = SigmaForm::from_polynomial(&g(1, 0), &g(0, 0), &g(2, 0)).unwrap();
        let r = orbit_along(&t, &x, None).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert!(r.cardinality() <= 4);
        assert!(r.last_new_index.unwrap() <= 3);
        let target = SigmaForm::symmetric(Sigma::Identity, k(1, 0), k(0, -1), k(1, 0)).unwrap();
        assert!(r.forms.contains(&target));
    }

    #[test]
    fn orbit_rejects_non_zero() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 5).unwrap();
        let x = SigmaForm::from_polynomial(&g(1, 0), &g(0, 0), &g(3, 0)).unwrap();
        assert_eq!(orbit_along(&t, &x, None).unwrap_err(), Error::NotAZero);
    }

    #[test]
    fn hermitian_loci() {
        let f = |a: i64, b: KElem, c: i64| hermitian_roots(&SigmaForm::hermitian(&rat(a, 1), &b, &rat(c, 1)).unwrap()).unwrap();
        assert_eq!(
            f(1, k(0, 0), -2),
            HermitianLocus::Circle {
                center: k(0, 0),
                r2: rat(2, 1)
            }
        );
        assert_eq!(
            f(0, k(1, 0), 1),
            HermitianLocus::Line {
                normal: k(1, 0),
                offset: rat(-1, 2)
            }
        );
        assert_eq!(f(1, k(0, 0), 2), HermitianLocus::Empty);
        assert_eq!(
            f(2, k(0, 0), -2),
            HermitianLocus::Circle {
                center: k(0, 0),
                r2: rat(1, 1)
            }
        );
        assert_eq!(f(1, k(1, 1), 2), HermitianLocus::DegeneratePoint(k(-1, -1)));
    }

    #[test]
    fn hermitian_zero_on_surd() {
        // i√2 lies on |z|² = 2
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 30).unwrap();
        let x = SigmaForm::hermitian(&rat(1, 1), &k(0, 0), &rat(-2, 1)).unwrap();
        let r = orbit_along(&t, &x, None).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        let b = quotient_bound_from_orbit(&t, &x).unwrap();
        assert!(b.root_hits.is_empty());
        assert!(b.holds() && b.observed_sup <= b.bound && b.bound <= b.a_priori_bound, "{}", b.to_json());
    }
}
