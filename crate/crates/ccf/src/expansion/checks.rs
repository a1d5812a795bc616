//! Identities, monotonicity criteria, Condition (H), `θ_n` and neat subsets along a trace.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use std::cmp::Ordering;

use super::{ExpansionTrace, Iterate, TraceValue};
use crate::arithmetic::{BallComplex, DyInterval, LElem, Real2};
use crate::error::{Error, Result};
use crate::regions::Region;
use crate::rings::{is_even_gaussian, KElem, Ring, RingElement, SymmetryElement};
use crate::util::{fmt_rat, rat, rat_to_f64};

/// Failures of one identity over a trace.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<usize>,
}

impl IdentityCheck {
    fn new(name: &'static str) -> Self {
        IdentityCheck {
            name,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, n: usize, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(n);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    /// Exact equalities for surd traces, containment for ball traces.
    pub exact: bool,
    pub checks: Vec<IdentityCheck>,
    pub q_norm_first: String,
    pub q_norm_last: String,
    /// `|q_n|²` at the end exceeds every value in the first half of the trace.
    pub q_growing: bool,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures.is_empty())
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v["passed"] = json!(self.passed());
        v
    }
}

fn sign_pm(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Determinant, contraction and the three relations between `z`, `z_{n+1}` and the `Q`-pair.
pub fn verify_identities(trace: &ExpansionTrace) -> IdentityReport {
    let ring = trace.ring;
    let mut det = IdentityCheck::new("determinant");
    for n in 0..trace.len() {
        let n_i = n as isize;
        let lhs = &(&trace.p(n_i) * &trace.q(n_i - 1)) - &(&trace.p(n_i - 1) * &trace.q(n_i));
        let rhs = RingElement::from_i64(ring, -sign_pm(n), 0);
        det.record(n, lhs == rhs);
    }
    let mut checks = vec![det];
    let exact = !matches!(trace.z0(), Some(Iterate::Ball(_)));
    match trace.z0() {
        Some(Iterate::Surd(_)) => checks.extend(exact_identities(trace)),
        Some(Iterate::Ball(_)) => checks.extend(ball_identities(trace)),
        None => {}
    }
    let norms = trace.q_norms();
    let half_max = norms.iter().take(norms.len().div_ceil(2)).max().cloned();
    let q_growing = match (norms.last(), half_max) {
        (Some(last), Some(m)) if norms.len() >= 2 => *last > m,
        _ => false,
    };
    IdentityReport {
        exact,
        checks,
        q_norm_first: norms.first().map(|q| q.to_string()).unwrap_or_default(),
        q_norm_last: norms.last().map(|q| q.to_string()).unwrap_or_default(),
        q_growing,
    }
}

fn surd(trace: &ExpansionTrace, n: usize) -> Option<LElem> {
    match trace.z(n)? {
        Iterate::Surd(s) => Some(s.as_lelem().clone()),
        Iterate::Ball(_) => None,
    }
}

fn exact_identities(trace: &ExpansionTrace) -> Vec<IdentityCheck> {
    let mut i1 = IdentityCheck::new("(i) q_n z - p_n = (-1)^n / (z_1 ... z_{n+1})");
    let mut i2 = IdentityCheck::new("(ii) (z_{n+1} q_n + q_{n-1}) z = z_{n+1} p_n + p_{n-1}");
    let mut i3 = IdentityCheck::new("(iii) |z - p_n/q_n| = |q_n|^-2 |z_{n+1} + q_{n-1}/q_n|^-1");
    let mut contraction = IdentityCheck::new("0 < |z_n - a_n| < 1");
    let Some(z) = surd(trace, 0) else {
        return vec![];
    };
    let field = z.field().clone();
    let one = LElem::from_k(&field, KElem::one(trace.ring));
    let mut product = one.clone();
    for (n, s) in trace.steps.iter().enumerate() {
        let Some(zn1) = surd(trace, n + 1) else { break };
        let zn = surd(trace, n).expect("recorded iterate");
        let n_i = n as isize;
        let (p, q) = (KElem::from(&s.p), KElem::from(&s.q));
        let (pm, qm) = (KElem::from(&trace.p(n_i - 1)), KElem::from(&trace.q(n_i - 1)));
        product = product.mul(&zn1);
        let e = z.mul_k(&q).sub_k(&p);
        let sign = LElem::from_k(&field, KElem::from_ints(trace.ring, sign_pm(n), 0, 1));
        i1.record(n, e.mul(&product) == sign);
        let lhs = zn1.mul_k(&q).add_k(&qm).mul(&z);
        let rhs = zn1.mul_k(&p).add_k(&pm);
        i2.record(n, lhs == rhs);
        // |q_n z − p_n|·|q_n z_{n+1} + q_{n−1}| = 1
        let w = e.mul(&zn1.mul_k(&q).add_k(&qm));
        i3.record(n, abs2_is(&w, &BigRational::one()));
        let d = zn.sub_k(&KElem::from(&s.a));
        let ok = !d.is_zero() && d.abs2().add_rat(&-BigRational::one()).sign() == Ordering::Less;
        contraction.record(n, ok);
    }
    vec![i1, i2, i3, contraction]
}

fn abs2_is(w: &LElem, v: &BigRational) -> bool {
    if w.y.is_zero() {
        return w.x.norm() == *v;
    }
    w.abs2().add_rat(&-v).is_zero()
}

fn ball(trace: &ExpansionTrace, n: usize) -> Option<BallComplex> {
    match trace.z(n)? {
        Iterate::Ball(b) => Some(b),
        Iterate::Surd(_) => None,
    }
}

fn interval_contains(iv: &DyInterval, v: &BigRational) -> bool {
    iv.sub(&DyInterval::from_rat(v, iv.prec)).contains_zero()
}

fn ball_identities(trace: &ExpansionTrace) -> Vec<IdentityCheck> {
    let mut i1 = IdentityCheck::new("(i) q_n z - p_n = (-1)^n / (z_1 ... z_{n+1})");
    let mut i2 = IdentityCheck::new("(ii) (z_{n+1} q_n + q_{n-1}) z = z_{n+1} p_n + p_{n-1}");
    let mut i3 = IdentityCheck::new("(iii) |z - p_n/q_n| = |q_n|^-2 |z_{n+1} + q_{n-1}/q_n|^-1");
    let mut contraction = IdentityCheck::new("0 < |z_n - a_n| < 1");
    let Some(z) = ball(trace, 0) else {
        return vec![];
    };
    let mut product: Option<BallComplex> = None;
    for (n, s) in trace.steps.iter().enumerate() {
        let Some(zn1) = ball(trace, n + 1) else { break };
        let zn = ball(trace, n).expect("recorded iterate");
        let n_i = n as isize;
        let (pm, qm) = (trace.p(n_i - 1), trace.q(n_i - 1));
        product = Some(match product {
            None => zn1.clone(),
            Some(pr) => pr.mul(&zn1),
        });
        let e = z.mul_element(&s.q).sub_element(&s.p);
        let sign = RingElement::from_i64(trace.ring, sign_pm(n), 0);
        i1.record(n, e.mul(product.as_ref().expect("set above")).sub_element(&sign).contains_zero());
        let lhs = zn1.mul_element(&s.q).sub_element(&-&qm).mul(&z);
        let rhs = zn1.mul_element(&s.p).sub_element(&-&pm);
        i2.record(n, lhs.sub(&rhs).contains_zero());
        let w = e.mul(&zn1.mul_element(&s.q).sub_element(&-&qm));
        i3.record(n, interval_contains(&w.abs2_interval(), &BigRational::one()));
        let d = zn.sub_element(&s.a).abs2_interval();
        let below_one = d.sub(&DyInterval::from_int(&BigInt::one(), d.prec)).hi < BigInt::zero();
        // the ball may touch zero; z_n ∉ K is the caller's promise for ball input
        contraction.record(n, below_one);
    }
    vec![i1, i2, i3, contraction]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `|q_{m+1}| = |q_m|`.
    Nonstrict,
    /// `|q_{m+1}| < |q_m|`.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneViolation {
    pub m: usize,
    pub kind: ViolationKind,
}

/// The triple `(γ_0, γ_1, γ_2) = (r_{m−1}, r_m, r_{m+1})`; `None` stands for `r_0 = ∞`.
#[derive(Clone, Debug)]
pub struct LemmaTriple {
    pub gamma: [Option<KElem>; 3],
    pub hypotheses: bool,
    pub alpha2_below_two: bool,
    pub gamma1_in_closed_disc: bool,
    pub alpha1_in_open_disc: bool,
}

impl LemmaTriple {
    pub fn conclusions(&self) -> bool {
        self.alpha2_below_two && self.gamma1_in_closed_disc && self.alpha1_in_open_disc
    }

    pub fn to_json(&self) -> Value {
        json!({
            "gamma": self.gamma.iter().map(|g| g.as_ref().map_or("inf".into(), |g| g.to_exact_string())).collect::<Vec<_>>(),
            "hypotheses": self.hypotheses,
            "alpha2_below_two": self.alpha2_below_two,
            "gamma1_in_closed_disc": self.gamma1_in_closed_disc,
            "alpha1_in_open_disc": self.alpha1_in_open_disc,
        })
    }
}

/// Exact witnesses for a failure of monotonicity at `m ≥ 1`.
#[derive(Clone, Debug)]
pub struct MonotoneDiagnostics {
    pub m: usize,
    pub r_m: KElem,
    pub r_m1: KElem,
    pub a_m: RingElement,
    pub a_m1: RingElement,
    /// `−ā_{m+1}/(|a_{m+1}|² − 1)`.
    pub center: KElem,
    pub r_m1_at_most_one: bool,
    pub a_m1_below_two: bool,
    pub r_m_in_closed_disc: bool,
    pub a_m_in_open_disc: bool,
    pub triple: LemmaTriple,
}

impl MonotoneDiagnostics {
    pub fn branch_ii_holds(&self) -> bool {
        self.r_m1_at_most_one && self.a_m1_below_two && self.r_m_in_closed_disc && self.a_m_in_open_disc
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "r_m": self.r_m.to_exact_string(),
            "r_m+1": self.r_m1.to_exact_string(),
            "a_m": self.a_m.to_string(),
            "a_m+1": self.a_m1.to_string(),
            "center": self.center.to_exact_string(),
            "r_m+1_at_most_one": self.r_m1_at_most_one,
            "a_m+1_below_two": self.a_m1_below_two,
            "r_m_in_closed_disc": self.r_m_in_closed_disc,
            "a_m_in_open_disc": self.a_m_in_open_disc,
            "branch_ii": self.branch_ii_holds(),
            "triple": self.triple.to_json(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct MonotoneReport {
    pub checked: usize,
    pub violation: Option<MonotoneViolation>,
    /// `|a_n| > 1` for every recorded `n ≥ 1`.
    pub large_quotients: bool,
    pub diagnostics: Option<MonotoneDiagnostics>,
}

impl MonotoneReport {
    pub fn strict(&self) -> bool {
        self.violation.is_none()
    }

    /// `|q_{n+1}| ≥ |q_n|` throughout.
    pub fn nonstrict(&self) -> bool {
        !matches!(&self.violation, Some(v) if v.kind == ViolationKind::Strict)
    }

    pub fn verdict(&self) -> String {
        match &self.violation {
            None => "strict".into(),
            Some(MonotoneViolation { m, kind: ViolationKind::Nonstrict }) => format!("nonstrict-violation at n={m}"),
            Some(MonotoneViolation { m, kind: ViolationKind::Strict }) => format!("strict-violation at n={m}"),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict(),
            "checked": self.checked,
            "violation": self.violation,
            "large_quotients": self.large_quotients,
            "diagnostics": self.diagnostics.as_ref().map(|d| d.to_json()),
        })
    }
}

fn k_abs2(x: &KElem) -> BigRational {
    x.norm()
}

/// `|x − c|² ≤ r²` or `<` when `strict`.
fn in_disc(x: &KElem, c: &KElem, r2: &BigRational, strict: bool) -> bool {
    let d = k_abs2(&(x - c));
    if strict {
        d < *r2
    } else {
        d <= *r2
    }
}

/// Disc memberships shared by the corollary and the lemma: `γ ∈ B̄(c, 1/(N−1))`, `α ∈ B(c, N/(N−1))`.
fn disc_tests(alpha2: &KElem, gamma1: &KElem, alpha1: &KElem) -> (KElem, bool, bool) {
    let n = k_abs2(alpha2);
    let s = &n - BigRational::one();
    let center = (-alpha2.conj()).scale(&s.recip());
    let closed = in_disc(gamma1, &center, &(s.recip() * s.recip()), false);
    let open = in_disc(alpha1, &center, &(&n * &n / (&s * &s)), true);
    (center, closed, open)
}

fn lemma_triple(gamma: [Option<KElem>; 3]) -> Option<LemmaTriple> {
    let ring = gamma[1].as_ref()?.ring();
    let one = BigRational::one();
    let inv = |g: &Option<KElem>| -> Option<KElem> {
        match g {
            None => Some(KElem::zero(ring)),
            Some(g) => g.inv().ok(),
        }
    };
    let (g1, g2) = (gamma[1].clone()?, gamma[2].clone()?);
    let alpha1 = &g1 - &inv(&gamma[0])?;
    let alpha2 = &g2 - &inv(&gamma[1])?;
    let integral = alpha1.is_integral() && alpha2.is_integral();
    let g0_large = gamma[0].as_ref().is_none_or(|g| k_abs2(g) > one);
    let hypotheses = g0_large
        && k_abs2(&g1) > one
        && !g2.is_zero()
        && k_abs2(&g2) <= one
        && integral
        && k_abs2(&alpha2) > one;
    let (_, gamma1_in_closed_disc, alpha1_in_open_disc) = if k_abs2(&alpha2) > one {
        disc_tests(&alpha2, &g1, &alpha1)
    } else {
        (KElem::zero(ring), false, false)
    };
    Some(LemmaTriple {
        gamma,
        hypotheses,
        alpha2_below_two: k_abs2(&alpha2) < rat(4, 1),
        gamma1_in_closed_disc,
        alpha1_in_open_disc,
    })
}

/// Finds the first `n` with `|q_{n+1}| ≤ |q_n|` and evaluates the branch-(ii) witnesses.
pub fn check_monotone(trace: &ExpansionTrace) -> MonotoneReport {
    let norms = trace.q_norms();
    let violation = norms.windows(2).enumerate().find_map(|(n, w)| match w[1].cmp(&w[0]) {
        Ordering::Greater => None,
        Ordering::Equal => Some(MonotoneViolation {
            m: n,
            kind: ViolationKind::Nonstrict,
        }),
        Ordering::Less => Some(MonotoneViolation {
            m: n,
            kind: ViolationKind::Strict,
        }),
    });
    let one = BigInt::one();
    let large_quotients = trace.steps.iter().skip(1).all(|s| s.a.norm() > one);
    let diagnostics = match &violation {
        Some(v) if large_quotients && v.m >= 1 => diagnostics(trace, v.m),
        _ => None,
    };
    MonotoneReport {
        checked: norms.len(),
        violation,
        large_quotients,
        diagnostics,
    }
}

fn diagnostics(trace: &ExpansionTrace, m: usize) -> Option<MonotoneDiagnostics> {
    let r_m = trace.r(m)?;
    let r_m1 = trace.r(m + 1)?;
    let a_m = trace.steps[m].a.clone();
    let a_m1 = trace.steps[m + 1].a.clone();
    let alpha2 = KElem::from(&a_m1);
    let (center, r_m_in_closed_disc, a_m_in_open_disc) = disc_tests(&alpha2, &r_m, &KElem::from(&a_m));
    let gamma0 = if m == 1 { None } else { trace.r(m - 1) };
    let triple = lemma_triple([gamma0, Some(r_m.clone()), Some(r_m1.clone())])?;
    Some(MonotoneDiagnostics {
        m,
        r_m1_at_most_one: k_abs2(&r_m1) <= BigRational::one(),
        a_m1_below_two: a_m1.norm() < BigInt::from(4),
        r_m,
        r_m1,
        a_m,
        a_m1,
        center,
        r_m_in_closed_disc,
        a_m_in_open_disc,
        triple,
    })
}

pub fn check_monotone_sequence(ring: Ring, seq: &[RingElement]) -> Result<MonotoneReport> {
    Ok(check_monotone(&super::run_external(ring, seq, seq.len())?))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionHReport {
    pub satisfied: bool,
    /// First `n ≥ 1` with `|a_n| ≤ 1`.
    pub small_quotient: Option<usize>,
    /// First offending block `(k, l)`, scanning `l` upwards and `k` downwards.
    pub violation: Option<(usize, usize)>,
}

/// Condition (H) on a Gaussian sequence.
pub fn check_condition_h(seq: &[RingElement]) -> Result<ConditionHReport> {
    if let Some(a) = seq.iter().find(|a| a.ring != Ring::Gaussian) {
        return Err(Error::WrongRing {
            expected: Ring::Gaussian,
            found: a.ring,
        });
    }
    let one = BigInt::one();
    let small_quotient = (1..seq.len()).find(|&n| seq[n].norm() <= one);
    let two = BigInt::from(2);
    let four = BigInt::from(4);
    let mut violation = None;
    'outer: for l in 2..seq.len() {
        if seq[l].norm() != two {
            continue;
        }
        for k in (1..l).rev() {
            let s = SymmetryElement::SIGMA_Y.pow(l - k).apply(&seq[l]);
            let doubled = &s + &s;
            if seq[k] == doubled {
                continue;
            }
            if (&seq[k] - &s).norm() < four {
                violation = Some((k, l));
                break 'outer;
            }
            break;
        }
    }
    Ok(ConditionHReport {
        satisfied: small_quotient.is_none() && violation.is_none(),
        small_quotient,
        violation,
    })
}

#[derive(Clone, Debug)]
pub struct EvenTheoremReport {
    /// `z_n ∈ a_n + H` and evenness of small `a_n` for every recorded `n ≥ 1`.
    pub hypotheses_hold: bool,
    pub first_failure: Option<(usize, &'static str)>,
    pub monotone: MonotoneReport,
}

impl EvenTheoremReport {
    /// The hypotheses imply strict growth of `|q_n|`.
    pub fn consistent(&self) -> bool {
        !self.hypotheses_hold || self.monotone.strict()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "hypotheses_hold": self.hypotheses_hold,
            "first_failure": self.first_failure.map(|(n, why)| json!({"n": n, "reason": why})),
            "monotone": self.monotone.to_json(),
            "consistent": self.consistent(),
        })
    }
}

/// Checks the even-Gaussian monotonicity theorem on a Gaussian trace.
pub fn check_even_theorem(trace: &ExpansionTrace) -> Result<EvenTheoremReport> {
    if trace.ring != Ring::Gaussian {
        return Err(Error::WrongRing {
            expected: Ring::Gaussian,
            found: trace.ring,
        });
    }
    let h = Region::diamond_h();
    let nine = BigInt::from(9);
    let mut first_failure = None;
    for s in trace.steps.iter().skip(1) {
        let inside = match &s.z {
            Some(z) => {
                let k = KElem::from(&s.a);
                match z {
                    Iterate::Surd(z) => h.contains(&z.as_lelem().sub_k(&k)),
                    Iterate::Ball(b) => h.contains(&b.sub_element(&s.a)),
                }
            }
            None => Some(true),
        };
        let reason = match inside {
            Some(false) => Some("z_n outside a_n + H"),
            None => Some("membership in a_n + H undecided"),
            Some(true) if s.a.norm() < nine && !is_even_gaussian(&s.a)? => Some("|a_n| < 3 but a_n odd"),
            Some(true) => None,
        };
        if let Some(r) = reason {
            first_failure = Some((s.n, r));
            break;
        }
    }
    Ok(EvenTheoremReport {
        hypotheses_hold: first_failure.is_none(),
        first_failure,
        monotone: check_monotone(trace),
    })
}

/// `θ_n²`, exact for surd traces.
#[derive(Clone, Debug)]
pub enum ThetaValue {
    Exact(Real2),
    /// Outward-rounded bounds.
    Ball { lo: f64, hi: f64 },
}

#[derive(Clone, Debug)]
pub struct Theta {
    pub n: usize,
    pub theta_sq: ThetaValue,
    /// Whether the `|δ_n|/ν` branch attains the maximum.
    pub from_delta: bool,
    pub approx: f64,
}

impl Theta {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "theta": self.approx,
            "branch": if self.from_delta { "delta/nu" } else { "1/|z_{n+1}|" },
            "exact": matches!(self.theta_sq, ThetaValue::Exact(_)),
        })
    }
}

/// `θ_n = max{|δ_n|/ν, |z_{n+1}|^{-1}}`, defined when `|δ_n| < ν`.
pub fn compute_theta(trace: &ExpansionTrace, n: usize) -> Result<Theta> {
    let nu2 = rat(trace.ring.nu_squared(), 1);
    let delta = trace
        .delta(n)
        .ok_or_else(|| Error::Unsupported("θ_n needs a trace with iterates".into()))?;
    let zn1 = trace
        .z(n + 1)
        .ok_or_else(|| Error::Unsupported(format!("z_{} is not available", n + 1)))?;
    match (delta, zn1) {
        (TraceValue::Exact(d), Iterate::Surd(z)) => {
            let d2 = d.abs2();
            if d2.add_rat(&-&nu2).sign() != Ordering::Less {
                return Err(Error::HypothesisFailed(format!("|δ_{n}| ≥ ν")));
            }
            let a = d2.scale(&nu2.recip());
            let b = z.as_lelem().abs2().inv().ok_or(Error::DivisionByZero)?;
            let from_delta = a.cmp_to(&b) != Ordering::Less;
            let t = if from_delta { a } else { b };
            let approx = t.to_f64().sqrt();
            Ok(Theta {
                n,
                theta_sq: ThetaValue::Exact(t),
                from_delta,
                approx,
            })
        }
        (TraceValue::Ball(d), Iterate::Ball(z)) => {
            let d2 = d.abs2_interval().to_finterval();
            let nu2f = rat_to_f64(&nu2);
            if d2.lo >= nu2f {
                return Err(Error::HypothesisFailed(format!("|δ_{n}| ≥ ν")));
            }
            if d2.hi >= nu2f {
                return Err(Error::PrecisionExhausted { bits: d.precision() });
            }
            let a = d2.mul_f(1.0 / nu2f);
            let b = z.abs2_interval().to_finterval().recip();
            let (lo, hi) = (a.lo.max(b.lo), a.hi.max(b.hi));
            Ok(Theta {
                n,
                theta_sq: ThetaValue::Ball { lo, hi },
                from_delta: a.mid() >= b.mid(),
                approx: ((lo + hi) / 2.0).sqrt(),
            })
        }
        _ => Err(Error::Unsupported("mixed backends".into())),
    }
}

/// The sufficient conditions for an infinite neat subset.
#[derive(Clone, Debug, Serialize)]
pub struct NeatFlags {
    /// `|q_{n−1}| ≤ |q_n|` on the whole trace.
    pub monotone: bool,
    /// `min |z_n| > 1` over recorded `n ≥ 1`; this is the liminf when the trace is periodic.
    pub z_bounded_below: bool,
    /// `sup |ζ − f(ζ)| < 1` for the generating algorithm.
    pub contracting: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct NeatReport {
    pub alpha: BigRational,
    pub members: Vec<usize>,
    pub sup_delta: f64,
    /// `|δ_n| ≤ (|z_{n+1}| − 1)^{-1}` on `N`.
    pub delta_bound: bool,
    /// `|δ_{n−1}| ≤ |δ_n| + 1` on `N`.
    pub delta_step: bool,
    /// `|δ_n| ≤ (α − 1)^{-1}` on `N`.
    pub alpha_bound: bool,
    pub failures: Vec<(usize, &'static str)>,
    pub flags: NeatFlags,
}

impl NeatReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha": fmt_rat(&self.alpha),
            "members": self.members,
            "sup_delta": self.sup_delta,
            "delta_bound": self.delta_bound,
            "delta_step": self.delta_step,
            "alpha_bound": self.alpha_bound,
            "failures": self.failures.iter().map(|(n, w)| json!({"n": n, "check": w})).collect::<Vec<_>>(),
            "flags": self.flags,
        })
    }
}

fn constant(like: &Real2, r: BigRational) -> Real2 {
    Real2::rational(r, &like.a.n, &like.w)
}

/// `a ≤ b·√r` for `b, r ≥ 0`.
fn le_b_sqrt(a: &Real2, b: &Real2, r: &Real2) -> bool {
    a.sign() != Ordering::Greater || a.mul(a).cmp_to(&b.mul(b).mul(r)) != Ordering::Greater
}

/// `N = {n : |q_{n−1}| ≤ |q_n|, |z_{n+1}| > α}` with the relative-error bounds checked exactly.
pub fn neat_subset(trace: &ExpansionTrace, alpha: &BigRational) -> Result<NeatReport> {
    if *alpha <= BigRational::one() {
        return Err(Error::ParameterOutOfRange(format!("α = {} must exceed 1", fmt_rat(alpha))));
    }
    if !matches!(trace.z0(), Some(Iterate::Surd(_))) {
        return Err(Error::Unsupported("neat subsets need an exact trace".into()));
    }
    let one = BigRational::one();
    let alpha2 = alpha * alpha;
    let alpha_m1_sq = (alpha - &one) * (alpha - &one);
    let len = trace.len();
    let delta2: Vec<Real2> = (0..len)
        .map(|n| match trace.delta(n) {
            Some(TraceValue::Exact(d)) => d.abs2(),
            _ => unreachable!("exact trace"),
        })
        .collect();
    let z2: Vec<Real2> = (1..=len)
        .map(|n| match trace.z(n) {
            Some(Iterate::Surd(z)) => z.as_lelem().abs2(),
            _ => unreachable!("exact trace"),
        })
        .collect();
    let norms = trace.q_norms();
    let mut members = Vec::new();
    let mut failures = Vec::new();
    let (mut delta_bound, mut delta_step, mut alpha_bound) = (true, true, true);
    let mut sup_delta = 0f64;
    for n in 0..len {
        let q_ok = n == 0 || norms[n - 1] <= norms[n];
        if !q_ok || z2[n].add_rat(&-&alpha2).sign() != Ordering::Greater {
            continue;
        }
        members.push(n);
        let d = &delta2[n];
        sup_delta = sup_delta.max(d.to_f64().sqrt());
        // √D(√Z − 1) ≤ 1  ⇔  DZ − D − 1 ≤ 2√D
        let two = constant(d, rat(2, 1));
        if !le_b_sqrt(&d.mul(&z2[n]).sub(d).add_rat(&-&one), &two, d) {
            delta_bound = false;
            failures.push((n, "|delta_n| <= 1/(|z_{n+1}| - 1)"));
        }
        if n >= 1 && !le_b_sqrt(&delta2[n - 1].sub(d).add_rat(&-&one), &two, d) {
            delta_step = false;
            failures.push((n, "|delta_{n-1}| <= |delta_n| + 1"));
        }
        if d.scale(&alpha_m1_sq).add_rat(&-&one).sign() == Ordering::Greater {
            alpha_bound = false;
            failures.push((n, "|delta_n| <= 1/(alpha - 1)"));
        }
    }
    let flags = NeatFlags {
        monotone: norms.windows(2).all(|w| w[0] <= w[1]),
        z_bounded_below: z2.iter().all(|z| z.add_rat(&-&one).sign() == Ordering::Greater),
        contracting: trace.algorithm.as_ref().map(|a| a.uniformly_contracting()),
    };
    Ok(NeatReport {
        alpha: alpha.clone(),
        members,
        sup_delta,
        delta_bound,
        delta_step,
        alpha_bound,
        failures,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AlgorithmSpec;
    use crate::arithmetic::{Branch, QuadraticSurd};
    use crate::expansion::{run, run_external};

    fn g(a: i64, b: i64) -> RingElement {
        RingElement::from_i64(Ring::Gaussian, a, b)
    }

    fn i_sqrt2() -> QuadraticSurd {
        QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(2, 0), Branch::PositiveImaginary).unwrap()
    }

    #[test]
    fn identities_hold_on_golden_traces() {
        for alg in [AlgorithmSpec::hurwitz(), AlgorithmSpec::even()] {
            let t = run(&i_sqrt2(), &alg, 30).unwrap();
            let r = verify_identities(&t);
            assert!(r.passed(), "{}", r.to_json());
            assert!(r.exact && r.q_growing);
            assert_eq!(r.checks.len(), 5);
            assert!(r.checks.iter().all(|c| c.checked == 30));
        }
    }

    #[test]
    fn determinant_at_three() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 4).unwrap();
        let d = &(&t.p(3) * &t.q(2)) - &(&t.p(2) * &t.q(3));
        assert_eq!(d, g(1, 0));
    }

    #[test]
    fn monotone_verdicts() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::even(), 20).unwrap();
        assert!(check_monotone(&t).strict());
        let r = check_monotone_sequence(Ring::Gaussian, &[g(0, 0), g(3, 0), g(3, 0), g(3, 0)]).unwrap();
        assert_eq!(r.verdict(), "strict");
    }

    #[test]
    fn negative_control_witness() {
        let r = check_monotone_sequence(Ring::Gaussian, &[g(0, 0), g(1, 1), g(-1, 1)]).unwrap();
        assert_eq!(
            r.violation,
            Some(MonotoneViolation {
                m: 1,
                kind: ViolationKind::Strict
            })
        );
        let d = r.diagnostics.expect("diagnostics");
        assert_eq!(d.center, KElem::from(&g(1, 1)));
        assert!(d.a_m1_below_two && d.r_m_in_closed_disc && d.a_m_in_open_disc && d.r_m1_at_most_one);
        assert!(d.branch_ii_holds());
        assert!(d.triple.hypotheses && d.triple.conclusions());
        assert!(d.triple.gamma[0].is_none());
    }

    #[test]
    fn condition_h_examples() {
        let ok = check_condition_h(&[g(0, 0), g(3, 0), g(1, 1)]).unwrap();
        assert!(ok.satisfied);
        let bad = check_condition_h(&[g(0, 0), g(-1, 1), g(1, 1)]).unwrap();
        assert_eq!(bad.violation, Some((1, 2)));
        let chain = check_condition_h(&[g(0, 0), g(1, 2), g(-2, 2), g(1, 1)]).unwrap();
        assert_eq!(chain.violation, Some((1, 3)));
        let small = check_condition_h(&[g(0, 0), g(1, 0), g(3, 0)]).unwrap();
        assert_eq!(small.small_quotient, Some(1));
        let e = RingElement::from_i64(Ring::Eisenstein, 2, 0);
        assert!(check_condition_h(&[e]).is_err());
    }

    #[test]
    fn theta_values() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 4).unwrap();
        let target = 2f64.sqrt() - 1.0;
        let t1 = compute_theta(&t, 1).unwrap();
        let t0 = compute_theta(&t, 0).unwrap();
        assert!((t1.approx - target).abs() < 1e-12);
        assert!((t0.approx - target).abs() < 1e-12);
        assert!(!t0.from_delta);
        let ThetaValue::Exact(v) = t1.theta_sq else { panic!() };
        // θ₁² = 3 − 2√2
        let expected = constant(&v, rat(3, 1));
        let diff = v.sub(&expected);
        assert!((diff.to_f64() + 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn theta_hypothesis_guard() {
        // [0, 1, ...] forces |δ_0| = |z| which exceeds √2 for z = 3i√2
        let z = QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(18, 0), Branch::PositiveImaginary).unwrap();
        let t = run(&z, &AlgorithmSpec::hurwitz(), 3).unwrap();
        for n in 0..2 {
            match compute_theta(&t, n) {
                Ok(th) => assert!(th.approx < 1.0),
                Err(e) => assert!(matches!(e, Error::HypothesisFailed(_))),
            }
        }
        let ext = run_external(Ring::Gaussian, &[g(0, 0)], 1).unwrap();
        assert!(compute_theta(&ext, 0).is_err());
    }

    #[test]
    fn neat_subset_hurwitz() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 12).unwrap();
        let r = neat_subset(&t, &rat(2, 1)).unwrap();
        assert_eq!(r.members, (0..12).collect::<Vec<_>>());
        assert!(r.passed() && r.delta_bound && r.delta_step && r.alpha_bound);
        assert!(r.sup_delta <= 1.0 / 2f64.sqrt());
        assert!(r.flags.monotone && r.flags.z_bounded_below);
        assert_eq!(r.flags.contracting, Some(true));
        let none = neat_subset(&t, &rat(5, 2)).unwrap();
        assert!(none.members.is_empty());
        assert!(neat_subset(&t, &rat(1, 1)).is_err());
    }

    #[test]
    fn even_theorem_on_even_trace() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::even(), 20).unwrap();
        let r = check_even_theorem(&t).unwrap();
        assert!(r.hypotheses_hold && r.consistent(), "{}", r.to_json());
    }
}
