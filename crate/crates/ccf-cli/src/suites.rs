//! Corpus-wide verification suites.

use rayon::prelude::*;
use serde_json::{json, Value};

use ccf::algorithms::AlgorithmSpec;
use ccf::approximation::verify_app_pr;
use ccf::corpus::{generate, CorpusItem, CorpusSpec};
use ccf::expansion::{
    check_condition_h, check_monotone, neat_subset, run_with, verify_identities, ExpansionTrace, RunOptions,
    Termination,
};
use ccf::forms::{orbit_along, zero_correspondence, SigmaForm};
use num_rational::BigRational;
use ccf::regions::{verify_cor_gen, verify_geom_hurwitz, Region};
use ccf::rings::Ring;
use ccf::util::{fmt_rat, rat_to_f64};
use ccf::Error;

use crate::config::Config;
use crate::CliError;

/// How many failing items a report lists in full.
const LISTED: usize = 10;

pub struct SuiteOutcome {
    pub passed: bool,
    pub report: Value,
}

pub struct CorpusArgs<'a> {
    pub alg: &'a AlgorithmSpec,
    pub corpus: CorpusSpec,
    pub config: &'a Config,
}

fn trace_for(item: &CorpusItem, alg: &AlgorithmSpec, budget: usize) -> Result<ExpansionTrace, Error> {
    run_with(
        &item.surd,
        alg,
        RunOptions {
            budget,
            stop_at_period: true,
        },
    )
}

/// Runs `check` on every corpus item in parallel, keeping corpus order.
fn per_item<T: Send>(
    args: &CorpusArgs,
    check: impl Fn(&CorpusItem, ExpansionTrace) -> Result<T, Error> + Sync,
) -> Result<Vec<(CorpusItem, T)>, CliError> {
    let items = generate(args.alg.ring(), args.corpus);
    let budget = args.config.exact_budget;
    items
        .into_par_iter()
        .map(|item| {
            let trace = trace_for(&item, args.alg, budget)?;
            let out = check(&item, trace)?;
            Ok((item, out))
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(CliError::Lib)
}

fn envelope(suite: &str, args: &CorpusArgs, items: usize, violations: Vec<Value>, extra: Value) -> SuiteOutcome {
    let passed = violations.is_empty();
    let mut report = json!({
        "suite": suite,
        "algorithm": args.alg.to_string(),
        "ring": args.alg.ring().id(),
        "corpus": args.corpus.to_string(),
        "items": items,
        "violations": violations.len(),
        "failing_items": violations.into_iter().take(LISTED).collect::<Vec<_>>(),
        "passed": passed,
    });
    if let (Value::Object(r), Value::Object(e)) = (&mut report, extra) {
        r.extend(e);
    }
    SuiteOutcome { passed, report }
}

pub fn identities(args: &CorpusArgs) -> Result<SuiteOutcome, CliError> {
    let rows = per_item(args, |_, t| {
        let rep = verify_identities(&t);
        Ok((rep, t.len(), matches!(t.termination, Termination::PeriodFound { .. })))
    })?;
    let checked: usize = rows.iter().map(|(_, (r, _, _))| r.checks.iter().map(|c| c.checked).sum::<usize>()).sum();
    let no_period = rows.iter().filter(|(_, (_, _, p))| !p).count();
    let longest = rows.iter().map(|(_, (_, l, _))| *l).max().unwrap_or(0);
    let violations = rows
        .iter()
        .filter(|(_, (r, _, _))| !r.passed())
        .map(|(item, (r, _, _))| json!({"item": item.to_json(), "report": r.to_json()}))
        .collect();
    Ok(envelope(
        "identities",
        args,
        rows.len(),
        violations,
        json!({"checks": checked, "without_period": no_period, "longest_trace": longest}),
    ))
}

pub fn monotone(args: &CorpusArgs) -> Result<SuiteOutcome, CliError> {
    let rows = per_item(args, |_, t| Ok(check_monotone(&t)))?;
    let steps: usize = rows.iter().map(|(_, m)| m.checked).sum();
    let violations = rows
        .iter()
        .filter(|(_, m)| !m.strict())
        .map(|(item, m)| json!({"item": item.to_json(), "monotone": m.to_json()}))
        .collect();
    Ok(envelope("monotone", args, rows.len(), violations, json!({"steps_checked": steps})))
}

pub fn condition_h(args: &CorpusArgs) -> Result<SuiteOutcome, CliError> {
    if args.alg.ring() != Ring::Gaussian {
        return Err(CliError::Lib(Error::WrongRing {
            expected: Ring::Gaussian,
            found: args.alg.ring(),
        }));
    }
    let rows = per_item(args, |_, t| check_condition_h(&t.partial_quotients()))?;
    let violations = rows
        .iter()
        .filter(|(_, r)| !r.satisfied)
        .map(|(item, r)| json!({"item": item.to_json(), "violation": r.violation}))
        .collect();
    Ok(envelope("conditionH", args, rows.len(), violations, json!({})))
}

pub fn neat(args: &CorpusArgs, alpha: &BigRational) -> Result<SuiteOutcome, CliError> {
    let rows = per_item(args, |_, t| neat_subset(&t, alpha))?;
    let worst = rows.iter().map(|(_, r)| r.sup_delta).fold(0.0, f64::max);
    let violations = rows
        .iter()
        .filter(|(_, r)| !r.passed())
        .map(|(item, r)| json!({"item": item.to_json(), "report": r.to_json()}))
        .collect();
    Ok(envelope(
        "neat",
        args,
        rows.len(),
        violations,
        json!({"alpha": fmt_rat(alpha), "alpha_decimal": rat_to_f64(alpha), "worst_sup_delta": worst}),
    ))
}

pub fn appr(args: &CorpusArgs, max_n: usize) -> Result<SuiteOutcome, CliError> {
    let limit = args.config.enumeration_limit;
    let items = generate(args.alg.ring(), args.corpus);
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut worst: Option<f64> = None;
    let mut violations = Vec::new();
    for item in &items {
        let t = run_with(
            &item.surd,
            args.alg,
            RunOptions {
                budget: max_n + 2,
                stop_at_period: false,
            },
        )?;
        for n in 0..=max_n.min(t.len().saturating_sub(1)) {
            match verify_app_pr(&t, n, limit) {
                Ok(r) => {
                    checked += 1;
                    if let Some(m) = r.margin {
                        worst = Some(worst.map_or(m, |w| w.min(m)));
                    }
                    if !r.passed() {
                        violations.push(json!({"item": item.to_json(), "report": r.to_json()}));
                    }
                }
                Err(Error::HypothesisFailed(_)) => skipped += 1,
                Err(e) => return Err(CliError::Lib(e)),
            }
        }
    }
    Ok(envelope(
        "appr",
        args,
        items.len(),
        violations,
        json!({"max_n": max_n, "annuli_checked": checked, "skipped_hypothesis": skipped, "worst_margin": worst}),
    ))
}

pub fn forms(args: &CorpusArgs) -> Result<SuiteOutcome, CliError> {
    let rows = per_item(args, |item, t| {
        let [a, b, c] = &item.poly;
        let x = SigmaForm::from_polynomial(a, b, c)?;
        let orbit = orbit_along(&t, &x, None)?;
        let mut zeros = true;
        for n in 0..t.len() {
            zeros &= zero_correspondence(&t, &x, n)?.holds();
        }
        Ok((orbit, zeros))
    })?;
    let max_card = rows.iter().map(|(_, (o, _))| o.cardinality()).max().unwrap_or(0);
    let worst_ratio = rows
        .iter()
        .map(|(_, (o, _))| o.max_entry_abs / o.bound.max())
        .fold(0.0, f64::max);
    let violations = rows
        .iter()
        .filter(|(_, (o, z))| !o.passed() || !z)
        .map(|(item, (o, z))| json!({"item": item.to_json(), "orbit": o.to_json(), "zero_correspondence": z}))
        .collect();
    Ok(envelope(
        "forms",
        args,
        rows.len(),
        violations,
        json!({"max_orbit_size": max_card, "worst_entry_to_bound": worst_ratio}),
    ))
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum GeometryCheck {
    /// The Hurwitz algorithm against its region `Q_h`.
    HHurwitz,
    /// The perturbed Hurwitz algorithm against `Q_r`.
    HPerturb,
    /// The generalized disc-family corollary.
    CorGen,
}

pub fn geometry(check: GeometryCheck, r: &BigRational, mesh: i64, boundary_k: i64) -> Result<SuiteOutcome, CliError> {
    use num_traits::Signed;
    let report = match check {
        GeometryCheck::HHurwitz => verify_geom_hurwitz(&AlgorithmSpec::hurwitz(), &Region::q_h(), mesh)?,
        GeometryCheck::HPerturb => {
            if !r.is_positive() || r * r >= ccf::util::rat(1, 2) {
                return Err(CliError::Lib(Error::ParameterOutOfRange(format!(
                    "r = {} must satisfy 0 < r < 1/√2",
                    fmt_rat(r)
                ))));
            }
            let alg = AlgorithmSpec::perturbed_unchecked(r.clone());
            verify_geom_hurwitz(&alg, &Region::q_r(r), mesh)?
        }
        GeometryCheck::CorGen => verify_cor_gen(r, boundary_k)?,
    };
    Ok(SuiteOutcome {
        passed: report.passed(),
        report: report.to_json(),
    })
}
