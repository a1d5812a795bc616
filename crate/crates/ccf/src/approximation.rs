//! Best approximation by convergents, prefix certificates for badly approximable points,
//! and exact certification of badly approximable circles through norm representability.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::cmp::Ordering;

use crate::algorithms::nearest_in;
use crate::arithmetic::{BallComplex, DyInterval, FInterval, LElem, Real2};
use crate::error::{Error, Result};
use crate::expansion::{check_monotone, compute_theta, ExpansionTrace, Iterate, ThetaValue, TraceValue};
use crate::forms::SigmaForm;
use crate::rings::{KElem, Ring, RingElement};
use crate::util::{fmt_rat, int_to_f64, isqrt, rat_int, rat_to_f64};

/// Default ceiling on the norm bound of an enumeration.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;
/// Trial division runs up to this bound, so inputs below its square factor completely.
pub const TRIAL_DIVISION_LIMIT: u64 = 10_000_000;
/// Norms up to this bound are also found by direct lattice search.
pub const SEARCH_LIMIT: u64 = 1_000_000;

/// `|qz − p|²`, exact for surds and enclosed for balls.
#[derive(Clone, Debug)]
pub enum Distance2 {
    Exact(Real2),
    Enclosed(FInterval),
}

impl Distance2 {
    pub fn approx(&self) -> f64 {
        match self {
            Distance2::Exact(r) => r.to_f64(),
            Distance2::Enclosed(i) => i.mid(),
        }
    }

    fn enclosure(&self) -> FInterval {
        match self {
            Distance2::Exact(r) => DyInterval::enclose_real2(r, 96).to_finterval(),
            Distance2::Enclosed(i) => *i,
        }
    }

    fn exact_string(&self) -> Option<String> {
        match self {
            Distance2::Exact(r) => Some(r.to_string()),
            Distance2::Enclosed(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleRow {
    pub q: RingElement,
    pub p: RingElement,
    pub dist2: Distance2,
}

impl OracleRow {
    pub fn dist(&self) -> f64 {
        self.dist2.approx().max(0.0).sqrt()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q.to_string(),
            "p": self.p.to_string(),
            "q_norm": self.q.norm().to_string(),
            "dist": self.dist(),
            "dist2_exact": self.dist2.exact_string(),
        })
    }
}

/// Minimal `|qz − p|` for every `q` with `1 ≤ |q|² ≤ Q`, sorted by `|q|²`.
#[derive(Clone, Debug)]
pub struct OracleTable {
    pub ring: Ring,
    pub qmax: u64,
    pub rows: Vec<OracleRow>,
}

impl OracleTable {
    /// The row with least distance; ties go to the first row.
    pub fn minimum(&self) -> Option<&OracleRow> {
        self.rows
            .iter()
            .min_by(|a, b| a.dist2.approx().partial_cmp(&b.dist2.approx()).unwrap_or(Ordering::Equal))
    }

    pub fn row(&self, q: &RingElement) -> Option<&OracleRow> {
        self.rows.iter().find(|r| &r.q == q)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.id(),
            "qmax": self.qmax,
            "rows": self.rows.iter().map(OracleRow::to_json).collect::<Vec<_>>(),
            "minimum": self.minimum().map(OracleRow::to_json),
        })
    }
}

fn check_limit(bound: u64, limit: u64) -> Result<()> {
    if bound > limit {
        return Err(Error::EnumerationLimit { needed: bound, limit });
    }
    Ok(())
}

fn ring_of(z: &Iterate) -> Ring {
    match z {
        Iterate::Surd(s) => s.ring(),
        Iterate::Ball(_) => Ring::Gaussian,
    }
}

/// The nearest `p` to `qz` and `|qz − p|²`.
fn best_p(ring: Ring, z: &Iterate, q: &RingElement) -> Result<(RingElement, Distance2)> {
    match z {
        Iterate::Surd(s) => {
            let w = s.as_lelem().mul_k(&KElem::from(q));
            let p = nearest_in(ring, &w, |_| true)?;
            let e = w.sub_k(&KElem::from(&p));
            Ok((p, Distance2::Exact(e.abs2())))
        }
        Iterate::Ball(b) => {
            let w = b.mul_element(q);
            let p = nearest_in(ring, &w, |_| true)?;
            let e = w.sub_element(&p);
            Ok((p, Distance2::Enclosed(e.abs2_interval().to_finterval())))
        }
    }
}

fn oracle_in(ring: Ring, z: &Iterate, qs: Vec<RingElement>) -> Result<Vec<OracleRow>> {
    qs.into_par_iter()
        .map(|q| {
            let (p, dist2) = best_p(ring, z, &q)?;
            Ok(OracleRow { q, p, dist2 })
        })
        .collect()
}

/// Brute-force best approximations of `z` by `p/q` over all `q` of norm at most `qmax`.
///
/// Ball inputs are taken to be Gaussian; use [`best_approx_oracle_in`] for other rings.
pub fn best_approx_oracle(z: &Iterate, qmax: u64, limit: u64) -> Result<OracleTable> {
    best_approx_oracle_in(ring_of(z), z, qmax, limit)
}

pub fn best_approx_oracle_in(ring: Ring, z: &Iterate, qmax: u64, limit: u64) -> Result<OracleTable> {
    check_limit(qmax, limit)?;
    if let Iterate::Surd(s) = z {
        if s.ring() != ring {
            return Err(Error::WrongRing { expected: ring, found: s.ring() });
        }
    }
    let qs: Vec<RingElement> = ring
        .elements_of_norm_at_most(qmax as i64)
        .into_iter()
        .filter(|q| !q.is_zero())
        .collect();
    Ok(OracleTable {
        ring,
        qmax,
        rows: oracle_in(ring, z, qs)?,
    })
}

/// The outcome of checking `|qz − p| ≥ (1 − θ_n)|q_n z − p_n|` on an annulus.
#[derive(Clone, Debug)]
pub struct AppPrReport {
    pub n: usize,
    pub theta: f64,
    pub exact: bool,
    /// `(|q_{n−1}|², |q_n|²)`.
    pub annulus: (BigInt, BigInt),
    pub checked: usize,
    pub failures: Vec<(RingElement, RingElement)>,
    pub undecided: usize,
    /// `min |qz − p|/|q_n z − p_n| − (1 − θ_n)` over the annulus.
    pub margin: Option<f64>,
    pub argmin: Option<(RingElement, RingElement)>,
}

impl AppPrReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.undecided == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "theta": self.theta,
            "exact": self.exact,
            "annulus": [self.annulus.0.to_string(), self.annulus.1.to_string()],
            "checked": self.checked,
            "failures": self.failures.iter().map(|(q, p)| json!({"q": q.to_string(), "p": p.to_string()})).collect::<Vec<_>>(),
            "undecided": self.undecided,
            "margin": self.margin,
            "argmin": self.argmin.as_ref().map(|(q, p)| json!({"q": q.to_string(), "p": p.to_string()})),
            "passed": self.passed(),
        })
    }
}

/// `a ≤ b·√r` for `b, r ≥ 0`.
fn le_b_sqrt(a: &Real2, b: &Real2, r: &Real2) -> bool {
    a.sign() != Ordering::Greater || a.mul(a).cmp_to(&b.mul(b).mul(r)) != Ordering::Greater
}

/// Decides `√x ≥ (1 − √t)·√e` from enclosures; `None` when they overlap.
fn decide_fi(x: FInterval, e: FInterval, t: FInterval) -> Option<bool> {
    let rhs = FInterval::point(1.0).sub(t.sqrt()).mul(e.sqrt());
    let d = x.sqrt().sub(rhs);
    if d.lo > 0.0 {
        Some(true)
    } else if d.hi < 0.0 {
        Some(false)
    } else {
        None
    }
}

/// Lattice coordinates `(a, b)` of the elements with `lo < N(a + bg) ≤ hi`, row by row.
fn annulus_rows(ring: Ring, lo: i64, hi: i64) -> Vec<Vec<(i64, i64)>> {
    let (t, nn) = (ring.t() as i128, ring.n() as i128);
    let d = ring.d() as f64;
    let vmax = (2.0 * (hi as f64).sqrt() / d.sqrt()).floor() as i64 + 1;
    let umax = (hi as f64).sqrt().floor() as i64 + vmax + 1;
    (-vmax..=vmax)
        .map(|b| {
            (-umax..=umax)
                .filter(|&a| {
                    let (a, b) = (a as i128, b as i128);
                    let norm = a * a + t * a * b + nn * b * b;
                    norm > lo as i128 && norm <= hi as i128
                })
                .map(|a| (a, b))
                .collect()
        })
        .collect()
}

/// Floating-point `min_p |qz − p|` and its minimiser, for `q = a + bg`.
fn nearest_f64(ring: Ring, z: (f64, f64), (a, b): (i64, i64)) -> (f64, (i64, i64)) {
    let (qx, qy) = ring.to_cartesian(a as f64, b as f64);
    let (wx, wy) = (qx * z.0 - qy * z.1, qx * z.1 + qy * z.0);
    let (u, v) = ring.from_cartesian(wx, wy);
    let (u0, v0) = (u.round() as i64, v.round() as i64);
    let mut best = (f64::INFINITY, (0, 0));
    for pb in v0 - 2..=v0 + 2 {
        for pa in u0 - 2..=u0 + 2 {
            let (px, py) = ring.to_cartesian(pa as f64, pb as f64);
            let d = (wx - px).hypot(wy - py);
            if d < best.0 {
                best = (d, (pa, pb));
            }
        }
    }
    best
}

enum Screened {
    Clear(f64, (i64, i64), (i64, i64)),
    Close((i64, i64)),
}

/// Checks the best-approximation inequality for every `q` with `|q_{n−1}| < |q| ≤ |q_n|`.
///
/// Points far from the bound are cleared in floating point with a generous error allowance;
/// the rest are decided exactly (surds) or by enclosure (balls).
pub fn verify_app_pr(trace: &ExpansionTrace, n: usize, limit: u64) -> Result<AppPrReport> {
    if n >= trace.len() {
        return Err(Error::ParameterOutOfRange(format!("n = {n} is past the trace")));
    }
    let theta = compute_theta(trace, n)?;
    let z = trace
        .z0()
        .ok_or_else(|| Error::Unsupported("best approximation needs a trace with iterates".into()))?;
    let ring = trace.ring;
    let lo = trace.q(n as isize - 1).norm();
    let hi = trace.q(n as isize).norm();
    let hi_u = hi.to_u64().unwrap_or(u64::MAX);
    check_limit(hi_u, limit)?;
    let (_, e) = best_p_fixed(z, &trace.q(n as isize), &trace.p(n as isize));
    let t_fi = match &theta.theta_sq {
        ThetaValue::Exact(t) => DyInterval::enclose_real2(t, 96).to_finterval(),
        ThetaValue::Ball { lo, hi } => FInterval { lo: *lo, hi: *hi },
    };
    let e_fi = e.enclosure();
    let e_abs = e.approx().max(0.0).sqrt();
    let trivially = t_fi.lo >= 1.0;
    // clearing threshold: (1 − θ)|e_n| from above
    let threshold = FInterval::point(1.0).sub(t_fi.sqrt()).mul(e_fi.sqrt()).hi;
    let zf = z.approx();
    let zabs = zf.0.hypot(zf.1);
    let lo_i = lo.to_i64().expect("norms within the enumeration limit");
    let rows = annulus_rows(ring, lo_i, hi_u as i64);
    let screened: Vec<Screened> = rows
        .into_par_iter()
        .flat_map_iter(|row| {
            row.into_iter().map(move |q| {
                let (d, p) = nearest_f64(ring, zf, q);
                let qabs = ring.to_cartesian(q.0 as f64, q.1 as f64);
                let tol = 1e-9 * (1.0 + qabs.0.hypot(qabs.1) * (zabs + 1.0));
                if trivially || d - tol > threshold {
                    Screened::Clear(d, q, p)
                } else {
                    Screened::Close(q)
                }
            })
        })
        .collect();
    let checked = screened.len();
    let mut failures = Vec::new();
    let mut undecided = 0;
    let mut argmin: Option<(f64, RingElement, RingElement)> = None;
    let elem = |(a, b): (i64, i64)| RingElement::from_i64(ring, a, b);
    let mut consider = |d: f64, q: RingElement, p: RingElement| {
        if argmin.as_ref().is_none_or(|(m, _, _)| d < *m) {
            argmin = Some((d, q, p));
        }
    };
    for s in screened {
        match s {
            Screened::Clear(d, q, p) => consider(d, elem(q), elem(p)),
            Screened::Close(q) => {
                let q = elem(q);
                let (p, x) = best_p(ring, z, &q)?;
                let ok = match decide_fi(x.enclosure(), e_fi, t_fi) {
                    Some(ok) => Some(ok),
                    None => match (&x, &e, &theta.theta_sq) {
                        (Distance2::Exact(x), Distance2::Exact(e), ThetaValue::Exact(t)) => {
                            // X ≥ (1 − √T)²E  ⇔  E(1 + T) − X ≤ 2E·√T
                            let lhs = e.mul(&t.add_rat(&BigRational::one())).sub(x);
                            let two_e = e.scale(&BigRational::from_integer(2.into()));
                            Some(le_b_sqrt(&lhs, &two_e, t))
                        }
                        _ => None,
                    },
                };
                match ok {
                    Some(true) => {}
                    Some(false) => failures.push((q.clone(), p.clone())),
                    None => undecided += 1,
                }
                consider(x.approx().max(0.0).sqrt(), q, p);
            }
        }
    }
    let margin = argmin.as_ref().map(|(d, _, _)| d / e_abs - (1.0 - theta.approx));
    Ok(AppPrReport {
        n,
        theta: theta.approx,
        exact: matches!(theta.theta_sq, ThetaValue::Exact(_)),
        annulus: (lo, hi),
        checked,
        failures,
        undecided,
        margin,
        argmin: argmin.map(|(_, q, p)| (q, p)),
    })
}

/// `|qz − p|²` for a given pair.
fn best_p_fixed(z: &Iterate, q: &RingElement, p: &RingElement) -> (RingElement, Distance2) {
    let d = match z {
        Iterate::Surd(s) => {
            let e: LElem = s.as_lelem().mul_k(&KElem::from(q)).sub_k(&KElem::from(p));
            Distance2::Exact(e.abs2())
        }
        Iterate::Ball(b) => {
            let e: BallComplex = b.mul_element(q).sub_element(p);
            Distance2::Enclosed(e.abs2_interval().to_finterval())
        }
    };
    (p.clone(), d)
}

#[derive(Clone, Debug, PartialEq)]
pub enum BadApproxVerdict {
    /// The prefix supports `|z − p/q| ≥ δ̂/|q|²` with the given constant.
    ConsistentWithBad { delta_hat: f64 },
    /// The convergent at `n` approximates unusually well and the quotients keep growing.
    KApproachWitness { n: usize, delta: f64 },
    Inconclusive { reason: String },
    /// The standing hypotheses fail on the prefix; no assessment is made.
    HypothesesViolated { reasons: Vec<String> },
}

#[derive(Clone, Debug)]
pub struct BadApproxReport {
    pub verdict: BadApproxVerdict,
    pub steps: usize,
    pub sup_quotient: f64,
    pub inf_z: Option<f64>,
    pub tail_sup_delta: Option<f64>,
    /// `1/(sup|a_{n+1}| + 2)`.
    pub delta_prime: Option<f64>,
    /// `sup θ_n` on the prefix.
    pub lambda: Option<f64>,
    /// `|δ_n| ≥ δ̂` on every recorded step.
    pub prefix_verified: bool,
}

impl BadApproxReport {
    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            BadApproxVerdict::ConsistentWithBad { delta_hat } => {
                json!({"kind": "consistent_with_bad", "delta_hat": delta_hat})
            }
            BadApproxVerdict::KApproachWitness { n, delta } => {
                json!({"kind": "k_approach_witness", "n": n, "delta": delta})
            }
            BadApproxVerdict::Inconclusive { reason } => json!({"kind": "inconclusive", "reason": reason}),
            BadApproxVerdict::HypothesesViolated { reasons } => {
                json!({"kind": "hypotheses_violated", "reasons": reasons})
            }
        };
        json!({
            "verdict": verdict,
            "steps": self.steps,
            "sup_quotient": self.sup_quotient,
            "inf_z": self.inf_z,
            "tail_sup_delta": self.tail_sup_delta,
            "delta_prime": self.delta_prime,
            "lambda": self.lambda,
            "prefix_verified": self.prefix_verified,
        })
    }
}

fn abs_elem(a: &RingElement) -> f64 {
    int_to_f64(&a.norm()).sqrt()
}

/// Largest `|a_n|` for `n ≥ 1` over the first and second halves of the sequence.
fn quotient_growth(trace: &ExpansionTrace) -> (f64, f64) {
    let a: Vec<f64> = trace.steps.iter().skip(1).map(|s| abs_elem(&s.a)).collect();
    let mid = a.len() / 2;
    let first = a[..mid].iter().copied().fold(0.0, f64::max);
    let second = a[mid..].iter().copied().fold(0.0, f64::max);
    (first, second)
}

fn growing(first: f64, second: f64) -> bool {
    second > 4.0 * first.max(1.0)
}

/// `|z_n|` with `n ≥ 1` exceeding 1, exactly for surds and rigorously for balls.
fn exceeds_one(z: &Iterate) -> bool {
    match z {
        Iterate::Surd(s) => s.as_lelem().abs2().add_rat(&-BigRational::one()).sign() == Ordering::Greater,
        Iterate::Ball(b) => b.abs2_interval().to_finterval().lo > 1.0,
    }
}

/// `|δ| ≥ c` for a rational `c ≥ 0`.
fn delta_at_least(d: &TraceValue, c: &BigRational) -> bool {
    match d {
        TraceValue::Exact(l) => {
            let a = l.abs2();
            a.add_rat(&-(c * c)).sign() != Ordering::Less
        }
        TraceValue::Ball(b) => b.abs2_interval().to_finterval().lo >= rat_to_f64(&(c * c)),
    }
}

/// Evaluates the bounded-quotient criterion on a trace prefix.
pub fn badly_approximable_assess(trace: &ExpansionTrace) -> Result<BadApproxReport> {
    let mono = check_monotone(trace);
    if !mono.nonstrict() {
        let m = mono.violation.as_ref().map_or(0, |v| v.m);
        return Err(Error::MonotonicityRequired(m));
    }
    let sup_quotient = trace.steps.iter().skip(1).map(|s| abs_elem(&s.a)).fold(0.0, f64::max);
    let (first, second) = quotient_growth(trace);
    let mut report = BadApproxReport {
        verdict: BadApproxVerdict::Inconclusive { reason: String::new() },
        steps: trace.len(),
        sup_quotient,
        inf_z: None,
        tail_sup_delta: None,
        delta_prime: None,
        lambda: None,
        prefix_verified: false,
    };
    if trace.z0().is_none() {
        let reason = if growing(first, second) {
            format!("unbounded partial quotients: max |a_n| grows from {first:.4} to {second:.4}")
        } else {
            "no iterates to test the hypotheses on".to_string()
        };
        report.verdict = BadApproxVerdict::Inconclusive { reason };
        return Ok(report);
    }

    let nu = trace.ring.nu();
    let mut reasons = Vec::new();
    let zs: Vec<Iterate> = (1..=trace.len()).filter_map(|n| trace.z(n)).collect();
    report.inf_z = zs.iter().map(Iterate::abs_f64).reduce(f64::min);
    if let Some(n) = zs.iter().position(|z| !exceeds_one(z)) {
        reasons.push(format!("|z_{}| ≤ 1", n + 1));
    }
    let deltas: Vec<TraceValue> = (0..trace.len()).filter_map(|n| trace.delta(n)).collect();
    let tail = trace.len() / 2;
    let tail_sup = deltas[tail..].iter().map(TraceValue::abs_f64).fold(0.0, f64::max);
    report.tail_sup_delta = Some(tail_sup);
    if tail_sup >= nu {
        reasons.push(format!("sup |δ_n| over the second half is {tail_sup:.6} ≥ ν"));
    }
    if !reasons.is_empty() {
        report.verdict = BadApproxVerdict::HypothesesViolated { reasons };
        return Ok(report);
    }

    if growing(first, second) {
        let (n, d) = deltas
            .iter()
            .enumerate()
            .map(|(n, d)| (n, d.abs_f64()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
            .expect("a nonempty trace");
        report.verdict = BadApproxVerdict::KApproachWitness { n, delta: d };
        return Ok(report);
    }

    let delta_prime = 1.0 / (sup_quotient + 2.0);
    let mut lambda = 0f64;
    for n in 0..trace.len() {
        match compute_theta(trace, n) {
            Ok(t) => lambda = lambda.max(t.approx),
            Err(Error::HypothesisFailed(_)) => {}
            Err(e) => return Err(e),
        }
    }
    report.delta_prime = Some(delta_prime);
    report.lambda = Some(lambda);
    if lambda >= 1.0 {
        report.verdict = BadApproxVerdict::Inconclusive {
            reason: format!("sup θ_n = {lambda:.6} leaves no contraction margin"),
        };
        return Ok(report);
    }
    // δ̂ = δ′/(β(sup|a_n| + 1)) with β = (1 − λ)^{-1}, rounded down to a short rational
    let raw = delta_prime * (1.0 - lambda) / (sup_quotient + 1.0);
    let scale = 1u64 << 40;
    let delta_hat = BigRational::new(BigInt::from((raw * scale as f64).floor() as u64), BigInt::from(scale));
    report.prefix_verified = deltas.iter().all(|d| delta_at_least(d, &delta_hat));
    report.verdict = if report.prefix_verified {
        BadApproxVerdict::ConsistentWithBad {
            delta_hat: rat_to_f64(&delta_hat),
        }
    } else {
        BadApproxVerdict::Inconclusive {
            reason: "the prefix violates the derived lower bound".into(),
        }
    };
    Ok(report)
}

/// A decision on whether `n` is a norm, with an element of that norm when it is.
#[derive(Clone, Debug)]
pub struct NormWitness {
    pub ring: Ring,
    pub n: BigInt,
    pub witness: Option<RingElement>,
    pub factorization: Vec<(u64, u32)>,
    /// Primes that stay prime in the ring and divide `n` to an odd power.
    pub obstructions: Vec<u64>,
    /// Agreement with direct lattice search, for small `n`.
    pub search_agrees: Option<bool>,
}

impl NormWitness {
    pub fn is_norm(&self) -> bool {
        self.witness.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.id(),
            "n": self.n.to_string(),
            "is_norm": self.is_norm(),
            "witness": self.witness.as_ref().map(|w| w.to_string()),
            "factorization": self.factorization,
            "obstructions": self.obstructions,
            "search_agrees": self.search_agrees,
        })
    }
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n && p <= TRIAL_DIVISION_LIMIT {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// A square root of `a` modulo an odd prime `p` (Tonelli–Shanks).
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, q.div_ceil(2), p));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// A root of `x² − tx + n` modulo `p`: the generator's minimal polynomial.
fn generator_root_mod(ring: Ring, p: u64) -> Option<u64> {
    let t = ring.t().rem_euclid(p as i64) as u64;
    let nn = ring.n().rem_euclid(p as i64) as u64;
    if p == 2 {
        return (0..2).find(|&x| (x * x + 2 * p - t * x % p + nn) % p == 0);
    }
    // x = (t + s)/2 with s² = t² − 4n
    let disc = (mul_mod(t, t, p) + 4 * p - mul_mod(4, nn, p)) % p;
    let s = sqrt_mod(disc, p)?;
    let inv2 = p.div_ceil(2);
    Some(mul_mod((t + s) % p, inv2, p))
}

/// An element of prime norm `p`, or `None` when `p` stays prime.
fn prime_element(ring: Ring, p: u64) -> Option<RingElement> {
    let r = generator_root_mod(ring, p)?;
    let pe = RingElement::integer(ring, BigInt::from(p));
    let h = RingElement::new(ring, -BigInt::from(r), BigInt::one());
    let pi = pe.gcd(&h);
    debug_assert_eq!(pi.norm(), BigInt::from(p));
    Some(pi)
}

/// An element of norm exactly `n` by scanning `b` and solving for `a`.
pub fn norm_by_search(n: &BigInt, ring: Ring) -> Option<RingElement> {
    // 4N(a + bg) = (2a + tb)² + D b²
    let d = BigInt::from(ring.d());
    let four_n = n * 4;
    let mut b = BigInt::zero();
    let mut found = Vec::new();
    while &d * &b * &b <= four_n {
        let rest: BigInt = &four_n - &d * &b * &b;
        let s = isqrt(&rest);
        if &s * &s == rest {
            for s in [s.clone(), -s.clone()] {
                for bb in [b.clone(), -b.clone()] {
                    let two_a: BigInt = &s - BigInt::from(ring.t()) * &bb;
                    if two_a.is_even() {
                        found.push(RingElement::new(ring, two_a / 2, bb));
                    }
                }
            }
        }
        b += 1;
    }
    found.into_iter().map(|x| x.canonical_associate(true)).max_by(|x, y| x.lex_cmp(y))
}

/// Whether `n ≥ 1` is the norm of a ring element, by factoring `n` and splitting its primes.
pub fn is_norm(n: &BigInt, ring: Ring) -> Result<NormWitness> {
    if !n.is_positive() {
        return Err(Error::ParameterOutOfRange(format!("{n} is not a positive integer")));
    }
    let budget = (TRIAL_DIVISION_LIMIT as u128).pow(2);
    let nu = n
        .to_u64()
        .filter(|&v| (v as u128) < budget)
        .ok_or_else(|| Error::FactorizationBudget(n.to_string()))?;
    let factorization = factor(nu);
    let mut witness = RingElement::one(ring);
    let mut obstructions = Vec::new();
    for &(p, e) in &factorization {
        match prime_element(ring, p) {
            Some(pi) => witness = &witness * &pi.pow(e),
            None if e % 2 == 0 => {
                witness = &witness * &RingElement::integer(ring, BigInt::from(p).pow(e / 2));
            }
            None => obstructions.push(p),
        }
    }
    let witness = obstructions.is_empty().then(|| witness.canonical_associate(true));
    let search_agrees = (nu <= SEARCH_LIMIT).then(|| norm_by_search(n, ring).is_some() == witness.is_some());
    Ok(NormWitness {
        ring,
        n: n.clone(),
        witness,
        factorization,
        obstructions,
        search_agrees,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum CircleVerdict {
    /// Every point of the circle is badly approximable.
    CertifiedBad,
    /// The circle passes through `witness ∈ K`.
    ContainsKPoint { witness: KElem },
}

#[derive(Clone, Debug)]
pub struct CircleCertificate {
    pub ring: Ring,
    pub center: KElem,
    pub r2: BigRational,
    pub s: NormWitness,
    pub t: NormWitness,
    pub verdict: CircleVerdict,
    /// `|witness − center|² = r²`, checked exactly.
    pub witness_on_circle: Option<bool>,
}

impl CircleCertificate {
    /// `p/q` with `N(p) = s` and `N(q) = t`, before translation by the center.
    pub fn witness_fraction(&self) -> Option<String> {
        let (p, q) = (self.s.witness.as_ref()?, self.t.witness.as_ref()?);
        Some(format!("({p})/({q})"))
    }

    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            CircleVerdict::CertifiedBad => json!({"kind": "certified_bad"}),
            CircleVerdict::ContainsKPoint { witness } => json!({
                "kind": "contains_k_point",
                "witness": witness.to_exact_string(),
                "witness_fraction": self.witness_fraction(),
                "witness_decimal": witness.approx(),
            }),
        };
        json!({
            "ring": self.ring.id(),
            "center": self.center.to_exact_string(),
            "r2": fmt_rat(&self.r2),
            "r2_decimal": rat_to_f64(&self.r2),
            "s": self.s.to_json(),
            "t": self.t.to_json(),
            "verdict": verdict,
            "witness_on_circle": self.witness_on_circle,
        })
    }
}

/// Decides whether the circle `|z − κ|² = r²` meets `K`; if not, all its points are badly approximable.
pub fn certify_bad_circle(center: &KElem, r2: &BigRational, ring: Ring) -> Result<CircleCertificate> {
    if center.ring() != ring {
        return Err(Error::WrongRing { expected: ring, found: center.ring() });
    }
    if !r2.is_positive() {
        return Err(Error::ParameterOutOfRange("r² must be positive".into()));
    }
    let s = is_norm(r2.numer(), ring)?;
    let t = is_norm(r2.denom(), ring)?;
    let (verdict, witness_on_circle) = match (&s.witness, &t.witness) {
        (Some(p), Some(q)) => {
            let w = &(&KElem::from(p) / &KElem::from(q)) + center;
            let on = (&w - center).norm() == *r2;
            (CircleVerdict::ContainsKPoint { witness: w }, Some(on))
        }
        _ => (CircleVerdict::CertifiedBad, None),
    };
    Ok(CircleCertificate {
        ring,
        center: center.clone(),
        r2: r2.clone(),
        s,
        t,
        verdict,
        witness_on_circle,
    })
}

/// The integral Hermitian form `a(|z − κ|² − r²)` with the least positive `a`.
pub fn circle_form(center: &KElem, r2: &BigRational) -> Result<SigmaForm> {
    let c = &center.norm() - r2;
    let b = -center;
    let kr = rat_int(&num_integer::lcm(b.denom().clone(), c.denom().clone()));
    SigmaForm::hermitian(&kr, &b.scale(&kr), &(&c * &kr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AlgorithmSpec;
    use crate::arithmetic::{Branch, QuadraticSurd};
    use crate::expansion::{run, run_external};
    use crate::util::{int, rat};

    fn g(a: i64, b: i64) -> RingElement {
        RingElement::from_i64(Ring::Gaussian, a, b)
    }

    fn i_sqrt2() -> QuadraticSurd {
        QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(2, 0), Branch::PositiveImaginary).unwrap()
    }

    #[test]
    fn oracle_on_i_sqrt2() {
        let z = Iterate::Surd(i_sqrt2());
        let table = best_approx_oracle(&z, 4, ENUMERATION_LIMIT).unwrap();
        assert_eq!(table.rows.len(), 12);
        let min = table.minimum().unwrap();
        assert!((min.dist() - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(min.q.norm(), int(4));
        let row = table.row(&g(0, -2)).unwrap();
        assert_eq!(row.p, g(3, 0));
        let row = table.row(&g(2, 0)).unwrap();
        assert_eq!(row.p, g(0, 3));
        let one = table.row(&g(1, 0)).unwrap();
        assert_eq!(one.p, g(0, 1));
        assert!((one.dist() - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        for u in Ring::Gaussian.units() {
            let a = table.row(&(&g(1, 1) * &u)).unwrap().dist();
            assert!((a - table.row(&g(1, 1)).unwrap().dist()).abs() < 1e-12);
        }
        assert!(matches!(
            best_approx_oracle(&z, 10, 5),
            Err(Error::EnumerationLimit { needed: 10, limit: 5 })
        ));
    }

    #[test]
    fn app_pr_on_i_sqrt2() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 12).unwrap();
        for n in 1..=3 {
            let r = verify_app_pr(&t, n, ENUMERATION_LIMIT).unwrap();
            assert!(r.passed(), "{}", r.to_json());
            assert!(r.margin.unwrap() >= 0.0);
        }
        let r = verify_app_pr(&t, 1, ENUMERATION_LIMIT).unwrap();
        assert!((r.theta - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert_eq!(r.checked, 8);
    }

    #[test]
    fn app_pr_guard() {
        // a_0 = 0 for z = 3i√2 gives |δ_0| = |z| > √2
        let z = QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(18, 0), Branch::PositiveImaginary).unwrap();
        let t = ExpansionTrace {
            ring: Ring::Gaussian,
            input: "3i√2".into(),
            algorithm: None,
            steps: vec![crate::expansion::ExpansionStep {
                n: 0,
                a: g(0, 0),
                z: Some(Iterate::Surd(z)),
                p: g(0, 0),
                q: g(1, 0),
            }],
            termination: crate::expansion::Termination::SequenceEnd,
            period: None,
        };
        assert!(matches!(verify_app_pr(&t, 0, ENUMERATION_LIMIT), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn bad_approx_on_i_sqrt2() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 40).unwrap();
        let r = badly_approximable_assess(&t).unwrap();
        assert_eq!(r.sup_quotient, 2.0);
        assert_eq!(r.delta_prime, Some(0.25), "{}", r.to_json());
        assert!(r.prefix_verified);
        assert!(matches!(r.verdict, BadApproxVerdict::ConsistentWithBad { delta_hat } if delta_hat > 0.0));
    }

    #[test]
    fn bad_approx_on_growing_quotients() {
        let seq: Vec<RingElement> = (0..12).map(|k| g(0, 1 << (k + 1))).collect();
        let t = run_external(Ring::Gaussian, &seq, 12).unwrap();
        let r = badly_approximable_assess(&t).unwrap();
        assert!(matches!(r.verdict, BadApproxVerdict::Inconclusive { ref reason } if reason.contains("unbounded")));
    }

    #[test]
    fn norms() {
        let w = is_norm(&int(5), Ring::Gaussian).unwrap();
        assert_eq!(w.witness, Some(g(2, 1)));
        assert_eq!(w.search_agrees, Some(true));
        assert!(!is_norm(&int(3), Ring::Gaussian).unwrap().is_norm());
        let e = is_norm(&int(3), Ring::Eisenstein).unwrap();
        assert_eq!(e.witness, Some(RingElement::from_i64(Ring::Eisenstein, 2, 1)));
        for ring in [Ring::Gaussian, Ring::Eisenstein, Ring::Sqrt2, Ring::Disc7, Ring::Disc11] {
            let w = is_norm(&int(1847), ring).unwrap();
            assert!(!w.is_norm(), "{ring}");
            assert_eq!(w.obstructions, vec![1847]);
        }
        assert!(matches!(
            is_norm(&(int(10).pow(15u32)), Ring::Gaussian),
            Err(Error::FactorizationBudget(_))
        ));
    }

    #[test]
    fn norm_agrees_with_search() {
        for ring in [Ring::Gaussian, Ring::Eisenstein, Ring::Sqrt2, Ring::Disc7, Ring::Disc11] {
            for n in 1..400 {
                let w = is_norm(&int(n), ring).unwrap();
                assert_eq!(w.search_agrees, Some(true), "{ring} {n}");
                if let Some(x) = &w.witness {
                    assert_eq!(x.norm(), int(n));
                }
            }
        }
    }

    #[test]
    fn circles() {
        let zero = KElem::zero(Ring::Gaussian);
        for r2 in [3, 7, 1847] {
            let c = certify_bad_circle(&zero, &rat(r2, 1), Ring::Gaussian).unwrap();
            assert_eq!(c.verdict, CircleVerdict::CertifiedBad);
        }
        let c = certify_bad_circle(&zero, &rat(5, 2), Ring::Gaussian).unwrap();
        let expected = &KElem::from(&g(2, 1)) / &KElem::from(&g(1, 1));
        assert_eq!(c.verdict, CircleVerdict::ContainsKPoint { witness: expected });
        assert_eq!(c.witness_on_circle, Some(true));
        assert_eq!(c.witness_fraction().as_deref(), Some("(2+i)/(1+i)"));
        let kappa = KElem::from_ints(Ring::Gaussian, 1, 3, 2);
        let shifted = certify_bad_circle(&kappa, &rat(5, 2), Ring::Gaussian).unwrap();
        assert_eq!(shifted.witness_on_circle, Some(true));
        let e = certify_bad_circle(&KElem::zero(Ring::Eisenstein), &rat(1847, 1), Ring::Eisenstein).unwrap();
        assert_eq!(e.verdict, CircleVerdict::CertifiedBad);
        // 10/4 reduces to 5/2
        let c = certify_bad_circle(&zero, &rat(10, 4), Ring::Gaussian).unwrap();
        assert!(matches!(c.verdict, CircleVerdict::ContainsKPoint { .. }));
    }

    #[test]
    fn circle_forms() {
        let f = circle_form(&KElem::zero(Ring::Gaussian), &rat(3, 1)).unwrap();
        assert_eq!(f.entries()[3], KElem::from_ints(Ring::Gaussian, -3, 0, 1));
        let f = circle_form(&KElem::from_ints(Ring::Gaussian, 1, 0, 2), &rat(1, 3)).unwrap();
        assert!(f.k().is_one());
    }
}
