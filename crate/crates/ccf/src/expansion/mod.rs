//! The expansion engine: `z_{n+1} = (z_n − a_n)^{-1}` with the `Q`-pair, relative errors
//! `δ_n`, ratios `r_n = q_n/q_{n−1}` and exact period detection.

mod checks;

pub use checks::{
    check_condition_h, check_even_theorem, check_monotone, check_monotone_sequence, compute_theta,
    neat_subset, verify_identities, ConditionHReport, EvenTheoremReport, IdentityReport,
    LemmaTriple, MonotoneDiagnostics, MonotoneReport, MonotoneViolation, NeatReport, Theta,
    ThetaValue, ViolationKind,
};

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::HashMap;

use crate::algorithms::AlgorithmSpec;
use crate::arithmetic::{BallComplex, BallSource, LElem, QuadraticSurd};
use crate::error::{Error, Result};
use crate::rings::{KElem, Ring, RingElement};

pub const EXACT_BUDGET: usize = 500;
pub const BALL_BUDGET: usize = 200;

/// The iterate `z_n`, exact or enclosed.
#[derive(Clone, Debug)]
pub enum Iterate {
    Surd(QuadraticSurd),
    Ball(BallComplex),
}

impl Iterate {
    pub fn approx(&self) -> (f64, f64) {
        match self {
            Iterate::Surd(z) => z.approx(),
            Iterate::Ball(b) => b.center_f64(),
        }
    }

    pub fn abs_f64(&self) -> f64 {
        let (x, y) = self.approx();
        x.hypot(y)
    }

    pub fn to_json(&self) -> Value {
        match self {
            Iterate::Surd(z) => serde_json::to_value(z).expect("surds serialize"),
            Iterate::Ball(b) => b.to_json(),
        }
    }
}

/// A value computed along a trace: an element of `K(√Δ)` or a ball.
#[derive(Clone, Debug)]
pub enum TraceValue {
    Exact(LElem),
    Ball(BallComplex),
}

impl TraceValue {
    pub fn approx(&self) -> (f64, f64) {
        match self {
            TraceValue::Exact(l) => l.approx(),
            TraceValue::Ball(b) => b.center_f64(),
        }
    }

    pub fn abs_f64(&self) -> f64 {
        match self {
            TraceValue::Exact(l) => l.abs2().to_f64().max(0.0).sqrt(),
            TraceValue::Ball(b) => {
                let (x, y) = b.center_f64();
                x.hypot(y)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpansionStep {
    pub n: usize,
    pub a: RingElement,
    /// Absent for traces of external sequences.
    pub z: Option<Iterate>,
    pub p: RingElement,
    pub q: RingElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    BudgetReached,
    /// `z_{n0+k} = z_{n0}`.
    PeriodFound { n0: usize, k: usize },
    /// No decision possible at `step` with `bits` of working precision.
    PrecisionExhausted { step: usize, bits: u32 },
    /// An external sequence ran out.
    SequenceEnd,
}

#[derive(Clone, Debug)]
pub struct ExpansionTrace {
    pub ring: Ring,
    pub input: String,
    /// `None` for external sequences.
    pub algorithm: Option<AlgorithmSpec>,
    pub steps: Vec<ExpansionStep>,
    pub termination: Termination,
    /// First detected repetition, kept even when iteration continued past it.
    pub period: Option<(usize, usize)>,
}

/// Extends a `Q`-pair by one partial quotient.
#[derive(Clone, Debug)]
struct QPair {
    p: [RingElement; 2],
    q: [RingElement; 2],
}

impl QPair {
    fn new(ring: Ring) -> Self {
        // (p_{−2}, p_{−1}) = (0, 1), (q_{−2}, q_{−1}) = (1, 0)
        QPair {
            p: [RingElement::zero(ring), RingElement::one(ring)],
            q: [RingElement::one(ring), RingElement::zero(ring)],
        }
    }

    fn push(&mut self, a: &RingElement) -> (RingElement, RingElement) {
        let p = &(a * &self.p[1]) + &self.p[0];
        let q = &(a * &self.q[1]) + &self.q[0];
        self.p = [self.p[1].clone(), p.clone()];
        self.q = [self.q[1].clone(), q.clone()];
        (p, q)
    }
}

/// Options for exact runs.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub budget: usize,
    /// Stop at the first repetition instead of running out the budget.
    pub stop_at_period: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            budget: EXACT_BUDGET,
            stop_at_period: true,
        }
    }
}

/// Expands a quadratic surd for `budget` steps, recording the first exact repetition.
pub fn run(z: &QuadraticSurd, alg: &AlgorithmSpec, budget: usize) -> Result<ExpansionTrace> {
    run_with(
        z,
        alg,
        RunOptions {
            budget,
            stop_at_period: false,
        },
    )
}

pub fn run_with(z: &QuadraticSurd, alg: &AlgorithmSpec, opts: RunOptions) -> Result<ExpansionTrace> {
    let ring = alg.ring();
    if z.ring() != ring {
        return Err(Error::WrongRing {
            expected: ring,
            found: z.ring(),
        });
    }
    let mut pair = QPair::new(ring);
    let mut seen: HashMap<QuadraticSurd, usize> = HashMap::new();
    let mut steps = Vec::new();
    let mut period = None;
    let mut cur = z.clone();
    let mut termination = Termination::BudgetReached;
    for n in 0..opts.budget {
        let a = alg.choose(&cur)?;
        let (p, q) = pair.push(&a);
        let next = cur.step(&a);
        if period.is_none() {
            if let Some(&m) = seen.get(&cur) {
                period = Some((m, n - m));
            } else {
                seen.insert(cur.clone(), n);
            }
        }
        steps.push(ExpansionStep {
            n,
            a,
            z: Some(Iterate::Surd(cur)),
            p,
            q,
        });
        if let (Some((n0, k)), true) = (period, opts.stop_at_period) {
            termination = Termination::PeriodFound { n0, k };
            break;
        }
        cur = next;
    }
    if let (Some((n0, k)), Termination::BudgetReached) = (period, &termination) {
        termination = Termination::PeriodFound { n0, k };
    }
    Ok(ExpansionTrace {
        ring,
        input: format!("{z}"),
        algorithm: Some(alg.clone()),
        steps,
        termination,
        period,
    })
}

/// Precision schedule for ball runs.
#[derive(Clone, Copy, Debug)]
pub struct BallOptions {
    pub budget: usize,
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions {
            budget: BALL_BUDGET,
            start_bits: 128,
            max_bits: 8192,
        }
    }
}

/// Expands a point given by enclosures. Every partial quotient is certified for all
/// points of the ball; when a decision fails the run restarts at doubled precision if
/// the source can be refined. Ball traces never claim periodicity.
pub fn run_ball(src: &dyn BallSource, alg: &AlgorithmSpec, opts: BallOptions) -> Result<ExpansionTrace> {
    let ring = alg.ring();
    let mut bits = opts.start_bits;
    loop {
        let mut pair = QPair::new(ring);
        let mut steps = Vec::new();
        let mut cur = src.at(bits);
        let mut failed = None;
        for n in 0..opts.budget {
            let a = match alg.choose(&cur) {
                Ok(a) => a,
                Err(Error::PrecisionExhausted { .. } | Error::Undecided) => {
                    failed = Some(n);
                    break;
                }
                Err(e) => return Err(e),
            };
            let next = cur.sub_element(&a).inv();
            let (p, q) = pair.push(&a);
            steps.push(ExpansionStep {
                n,
                a,
                z: Some(Iterate::Ball(cur)),
                p,
                q,
            });
            match next {
                Ok(b) => cur = b,
                Err(_) => {
                    failed = Some(n + 1);
                    break;
                }
            }
        }
        let termination = match failed {
            None => Termination::BudgetReached,
            Some(_) if src.refinable() && bits * 2 <= opts.max_bits => {
                bits *= 2;
                continue;
            }
            Some(step) => Termination::PrecisionExhausted { step, bits },
        };
        return Ok(ExpansionTrace {
            ring,
            input: src.describe(),
            algorithm: Some(alg.clone()),
            steps,
            termination,
            period: None,
        });
    }
}

/// The `Q`-pair of an arbitrary sequence; `q_n = 0` is recorded, not rejected.
pub fn run_external(ring: Ring, seq: &[RingElement], budget: usize) -> Result<ExpansionTrace> {
    let mut pair = QPair::new(ring);
    let mut steps = Vec::new();
    for (n, a) in seq.iter().take(budget).enumerate() {
        if a.ring != ring {
            return Err(Error::WrongRing {
                expected: ring,
                found: a.ring,
            });
        }
        let (p, q) = pair.push(a);
        steps.push(ExpansionStep {
            n,
            a: a.clone(),
            z: None,
            p,
            q,
        });
    }
    let termination = if seq.len() > budget {
        Termination::BudgetReached
    } else {
        Termination::SequenceEnd
    };
    Ok(ExpansionTrace {
        ring,
        input: "external sequence".into(),
        algorithm: None,
        steps,
        termination,
        period: None,
    })
}

impl ExpansionTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn partial_quotients(&self) -> Vec<RingElement> {
        self.steps.iter().map(|s| s.a.clone()).collect()
    }

    /// `q_n` for `n ≥ −1`.
    pub fn q(&self, n: isize) -> RingElement {
        if n < 0 {
            RingElement::zero(self.ring)
        } else {
            self.steps[n as usize].q.clone()
        }
    }

    /// `p_n` for `n ≥ −1`.
    pub fn p(&self, n: isize) -> RingElement {
        if n < 0 {
            RingElement::one(self.ring)
        } else {
            self.steps[n as usize].p.clone()
        }
    }

    pub fn q_norms(&self) -> Vec<BigInt> {
        self.steps.iter().map(|s| s.q.norm()).collect()
    }

    pub fn z0(&self) -> Option<&Iterate> {
        self.steps.first().and_then(|s| s.z.as_ref())
    }

    /// `z_n`, computing one step past the recorded range for exact traces.
    pub fn z(&self, n: usize) -> Option<Iterate> {
        if let Some(s) = self.steps.get(n) {
            return s.z.clone();
        }
        let last = self.steps.get(n.checked_sub(1)?)?;
        match &last.z {
            Some(Iterate::Surd(z)) => Some(Iterate::Surd(z.step(&last.a))),
            Some(Iterate::Ball(b)) => b.sub_element(&last.a).inv().ok().map(Iterate::Ball),
            None => None,
        }
    }

    /// `r_n = q_n/q_{n−1}` for `n ≥ 1` with `q_{n−1} ≠ 0`.
    pub fn r(&self, n: usize) -> Option<KElem> {
        if n == 0 || n >= self.len() {
            return None;
        }
        let prev = KElem::from(&self.steps[n - 1].q);
        prev.inv().ok().map(|i| &KElem::from(&self.steps[n].q) * &i)
    }

    /// `δ_n = q_n(q_n z − p_n)`.
    pub fn delta(&self, n: usize) -> Option<TraceValue> {
        let s = self.steps.get(n)?;
        let q = KElem::from(&s.q);
        let p = KElem::from(&s.p);
        Some(match self.z0()? {
            Iterate::Surd(z) => TraceValue::Exact(z.as_lelem().mul_k(&q).sub_k(&p).mul_k(&q)),
            Iterate::Ball(b) => {
                let e = b.mul_element(&s.q).sub_element(&s.p);
                TraceValue::Ball(e.mul_element(&s.q))
            }
        })
    }

    /// Replays the detected cycle: `z_{n0+k} = z_{n0}` and `a_{n+k} = a_n` on the record.
    pub fn verify_period(&self) -> bool {
        let Some((n0, k)) = self.period else {
            return true;
        };
        let same_z = match (self.z(n0), self.z(n0 + k)) {
            (Some(Iterate::Surd(u)), Some(Iterate::Surd(v))) => u == v,
            _ => false,
        };
        same_z && (n0..self.len().saturating_sub(k)).all(|n| self.steps[n + k].a == self.steps[n].a)
    }

    fn header(&self) -> Value {
        json!({
            "ring": self.ring.id(),
            "input": self.input,
            "algorithm": self.algorithm.as_ref().map_or_else(|| "external sequence".into(), |a| a.name()),
            "steps": self.len(),
            "termination": self.termination,
        })
    }

    /// Header line followed by one line per step, exact fields as strings.
    pub fn to_json_lines(&self) -> String {
        let mut out = self.header().to_string();
        out.push('\n');
        for s in &self.steps {
            let mut v = json!({
                "n": s.n,
                "a": s.a.to_string(),
                "p": s.p.to_string(),
                "q": s.q.to_string(),
                "q_abs2": s.q.norm().to_string(),
            });
            if let Some(z) = &s.z {
                v["z"] = z.to_json();
            }
            if let Some(d) = self.delta(s.n) {
                v["delta_abs"] = json!(d.abs_f64());
            }
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.header();
        v["partial_quotients"] = json!(self.steps.iter().map(|s| s.a.to_string()).collect::<Vec<_>>());
        v["q"] = json!(self.steps.iter().map(|s| s.q.to_string()).collect::<Vec<_>>());
        v["q_abs2"] = json!(self.q_norms().iter().map(|q| q.to_string()).collect::<Vec<_>>());
        v
    }

    /// `n, a_n, |q_n|², |δ_n|, flags` with flags `M` for `|q_n| > |q_{n−1}|`, `P` inside the period.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,a_n,q_abs2,delta_abs,flags\n");
        let mut prev = BigInt::from(0);
        for s in &self.steps {
            let qn = s.q.norm();
            let mut flags = String::new();
            if qn > prev {
                flags.push('M');
            }
            if matches!(self.period, Some((n0, _)) if s.n >= n0) {
                flags.push('P');
            }
            let d = self.delta(s.n).map(|d| format!("{:.12e}", d.abs_f64())).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{}\n", s.n, s.a, qn, d, flags));
            prev = qn;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::Branch;

    fn g(a: i64, b: i64) -> RingElement {
        RingElement::from_i64(Ring::Gaussian, a, b)
    }

    fn i_sqrt2() -> QuadraticSurd {
        QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(2, 0), Branch::PositiveImaginary).unwrap()
    }

    #[test]
    fn hurwitz_golden_trace() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 10).unwrap();
        let a = t.partial_quotients();
        assert_eq!(&a[..5], &[g(0, 1), g(0, -2), g(0, 2), g(0, -2), g(0, 2)]);
        assert_eq!(t.period, Some((1, 2)));
        assert_eq!(t.termination, Termination::PeriodFound { n0: 1, k: 2 });
        let q: Vec<RingElement> = t.steps.iter().take(5).map(|s| s.q.clone()).collect();
        assert_eq!(q, vec![g(1, 0), g(0, -2), g(5, 0), g(0, -12), g(29, 0)]);
        assert!(t.verify_period());
        assert_eq!(t.p(2), g(0, 7));
        assert_eq!(t.p(3), g(17, 0));
    }

    #[test]
    fn even_golden_trace() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::even(), 10).unwrap();
        let a = t.partial_quotients();
        assert_eq!(&a[..5], &[g(0, 2), g(0, 2), g(0, 4), g(0, 2), g(0, 4)]);
        assert_eq!(t.period, Some((1, 2)));
        let q: Vec<RingElement> = t.steps.iter().take(4).map(|s| s.q.clone()).collect();
        assert_eq!(q, vec![g(1, 0), g(0, 2), g(-7, 0), g(0, -12)]);
    }

    #[test]
    fn stop_at_period() {
        let t = run_with(&i_sqrt2(), &AlgorithmSpec::hurwitz(), RunOptions::default()).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.termination, Termination::PeriodFound { n0: 1, k: 2 });
    }

    #[test]
    fn first_relative_error() {
        let t = run(&i_sqrt2(), &AlgorithmSpec::hurwitz(), 3).unwrap();
        let (x, y) = t.delta(0).unwrap().approx();
        assert!(x.abs() < 1e-12 && (y - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        let d1 = t.delta(1).unwrap().abs_f64();
        assert!((d1 - 2.0 * (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn external_sequences() {
        let t = run_external(Ring::Gaussian, &[g(0, 0), g(2, 0), g(2, 0)], 10).unwrap();
        assert_eq!(t.q_norms(), vec![1.into(), 4.into(), 25.into()]);
        let t = run_external(Ring::Gaussian, &[g(0, 1), g(0, -2), g(0, 2)], 10).unwrap();
        assert_eq!(t.steps[2].q, g(5, 0));
        let t = run_external(Ring::Gaussian, &[g(0, 0), g(1, 1), g(-1, 1)], 10).unwrap();
        assert_eq!(t.steps[1].q, g(1, 1));
        assert_eq!(t.steps[2].q, g(-1, 0));
        assert_eq!(t.termination, Termination::SequenceEnd);
    }

    #[test]
    fn ball_run_matches_exact() {
        let z = i_sqrt2();
        let exact = run(&z, &AlgorithmSpec::hurwitz(), 40).unwrap();
        struct Src(QuadraticSurd);
        impl BallSource for Src {
            fn at(&self, prec: u32) -> BallComplex {
                self.0.embed(prec)
            }
            fn describe(&self) -> String {
                "i√2".into()
            }
        }
        let t = run_ball(&Src(z), &AlgorithmSpec::hurwitz(), BallOptions { budget: 40, ..Default::default() }).unwrap();
        assert_eq!(t.termination, Termination::BudgetReached);
        assert_eq!(t.partial_quotients(), exact.partial_quotients());
        assert!(t.period.is_none());
    }

    #[test]
    fn fixed_ball_runs_out_of_precision() {
        let b = crate::arithmetic::parse_ball("1.0+1.732050808i@1e-9", 64).unwrap();
        let src = crate::arithmetic::FixedBall(b);
        let t = run_ball(&src, &AlgorithmSpec::hurwitz(), BallOptions { budget: 50, ..Default::default() }).unwrap();
        assert!(matches!(t.termination, Termination::PrecisionExhausted { .. }));
        assert!(t.len() >= 3);
    }
}
