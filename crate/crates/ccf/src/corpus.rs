//! Seeded corpora of quadratic surds: roots of irreducible `az² + bz + c` with small coefficients.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::fmt;
use std::str::FromStr;

use crate::arithmetic::{Branch, QuadraticSurd};
use crate::error::{Error, Result};
use crate::rings::{Ring, RingElement};

pub const MAX_COEFF_NORM: i64 = 20;
pub const DEFAULT_SEED: u64 = 7;

/// `surds:N[:seed=S]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    pub count: usize,
    pub seed: u64,
}

impl FromStr for CorpusSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("corpus {s:?}: expected surds:N[:seed=S]"));
        let mut parts = s.trim().split(':');
        if parts.next() != Some("surds") {
            return Err(bad());
        }
        let count = parts.next().and_then(|n| n.parse().ok()).ok_or_else(bad)?;
        let seed = match parts.next() {
            None => DEFAULT_SEED,
            Some(p) => p.strip_prefix("seed=").and_then(|v| v.parse().ok()).ok_or_else(bad)?,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(CorpusSpec { count, seed })
    }
}

impl fmt::Display for CorpusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "surds:{}:seed={}", self.count, self.seed)
    }
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub index: usize,
    pub poly: [RingElement; 3],
    pub surd: QuadraticSurd,
}

impl CorpusItem {
    pub fn poly_string(&self) -> String {
        let [a, b, c] = &self.poly;
        format!("{a},{b},{c}")
    }

    pub fn to_json(&self) -> Value {
        json!({"index": self.index, "poly": self.poly_string(), "z": self.surd.to_string()})
    }
}

/// `count` surds over `ring` drawn by rejection sampling; the same seed gives the same list.
pub fn generate(ring: Ring, spec: CorpusSpec) -> Vec<CorpusItem> {
    let pool = ring.elements_of_norm_at_most(MAX_COEFF_NORM);
    let nonzero: Vec<&RingElement> = pool.iter().filter(|x| !x.is_zero()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    while out.len() < spec.count {
        let a = (*nonzero.choose(&mut rng).expect("nonempty pool")).clone();
        let b = pool.choose(&mut rng).expect("nonempty pool").clone();
        let c = (*nonzero.choose(&mut rng).expect("nonempty pool")).clone();
        if let Ok(surd) = QuadraticSurd::from_poly(&a, &b, &c, Branch::PositiveImaginary) {
            out.push(CorpusItem {
                index: out.len(),
                poly: [a, b, c],
                surd,
            });
        }
    }
    out
}
