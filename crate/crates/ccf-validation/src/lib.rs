//! Shared fixtures for the acceptance suite: the seeded corpus expanded under every
//! algorithm, and the one-line verdict format.

use std::fmt::Display;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use ccf::algorithms::AlgorithmSpec;
use ccf::corpus::{generate, CorpusItem, CorpusSpec};
use ccf::expansion::{run_with, ExpansionTrace, RunOptions};
use ccf::util::rat;
use ccf::Result;

pub const CORPUS: CorpusSpec = CorpusSpec { count: 100, seed: 7 };
pub const BUDGET: usize = 500;

/// Prints `PASS` or `FAIL` with a short summary.
pub fn report(id: u32, name: &str, ok: bool, detail: impl Display) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("{tag} criterion {id:>2} {name}: {detail}");
}

/// Hurwitz, even, Λ and perturbed (3/20) over G; nearest and χ = 5/4 over E.
pub fn algorithms() -> Vec<AlgorithmSpec> {
    vec![
        AlgorithmSpec::hurwitz(),
        AlgorithmSpec::even(),
        AlgorithmSpec::lambda(),
        AlgorithmSpec::perturbed(rat(3, 20)).expect("3/20 is admissible"),
        AlgorithmSpec::eisenstein(),
        AlgorithmSpec::chi(rat(5, 4)).expect("5/4 is admissible"),
    ]
}

pub struct CorpusRun {
    pub alg: AlgorithmSpec,
    pub traces: Vec<(CorpusItem, ExpansionTrace)>,
}

pub struct Runs {
    pub runs: Vec<CorpusRun>,
    pub elapsed: Duration,
}

impl Runs {
    /// Expands `spec` under each algorithm until a period appears or `budget` runs out.
    pub fn expand(spec: CorpusSpec, budget: usize) -> Result<Self> {
        let t = Instant::now();
        let runs = algorithms()
            .into_iter()
            .map(|alg| {
                let traces = generate(alg.ring(), spec)
                    .into_par_iter()
                    .map(|item| {
                        let opts = RunOptions {
                            budget,
                            stop_at_period: true,
                        };
                        run_with(&item.surd, &alg, opts).map(|t| (item, t))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(CorpusRun { alg, traces })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Runs {
            runs,
            elapsed: t.elapsed(),
        })
    }

    pub fn get(&self, name: &str) -> Option<&CorpusRun> {
        self.runs.iter().find(|r| r.alg.to_string() == name)
    }
}
