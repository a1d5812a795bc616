mod config;
mod suites;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use ccf::algorithms::AlgorithmSpec;
use ccf::approximation::{badly_approximable_assess, best_approx_oracle_in, certify_bad_circle};
use ccf::arithmetic::{parse_ball, Branch, FixedBall, QuadraticSurd};
use ccf::corpus::CorpusSpec;
use ccf::expansion::{run_ball, run_with, BallOptions, ExpansionTrace, Iterate, RunOptions, Termination};
use ccf::rings::{KElem, Ring, RingElement};
use ccf::util::parse_rat;
use ccf::Error;

use config::{Config, Format};
use suites::{CorpusArgs, GeometryCheck, SuiteOutcome};

/// Process exit codes.
mod exit {
    pub const OK: u8 = 0;
    pub const VIOLATION: u8 = 1;
    pub const INVALID_INPUT: u8 = 2;
    pub const PRECISION: u8 = 3;
    pub const BUDGET: u8 = 4;
    pub const HYPOTHESIS: u8 = 5;
    pub const IO: u8 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Lib(#[from] Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => exit::INVALID_INPUT,
            CliError::Io(_) => exit::IO,
            CliError::Lib(e) => match e {
                Error::PrecisionExhausted { .. } | Error::Undecided | Error::ContainsZero => exit::PRECISION,
                Error::EnumerationLimit { .. } | Error::FactorizationBudget(_) => exit::BUDGET,
                Error::HypothesisFailed(_) | Error::MonotonicityRequired(_) | Error::NotAZero => exit::HYPOTHESIS,
                _ => exit::INVALID_INPUT,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ccf", version, about = "Complex continued fractions over Euclidean imaginary-quadratic rings")]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Corpus seed used when `--corpus` names none.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Precision ceiling for ball runs, in bits.
    #[arg(long, global = true)]
    max_bits: Option<u32>,
    #[arg(long, global = true)]
    enumeration_limit: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a quadratic surd or a ball.
    Expand {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "hurwitz")]
        alg: String,
        #[arg(long)]
        steps: Option<usize>,
        /// Keep expanding after the period is found.
        #[arg(long)]
        full: bool,
    },
    /// Run a verification suite over a seeded corpus.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        alg: Option<String>,
        /// `surds:N[:seed=S]`.
        #[arg(long)]
        corpus: Option<String>,
        /// Threshold for neat subsets.
        #[arg(long, default_value = "2")]
        alpha: String,
        /// Largest index for best-approximation checks.
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, value_enum, default_value = "h-hurwitz")]
        check: GeometryCheck,
        /// Radius for the geometric checks.
        #[arg(long, default_value = "3/20")]
        r: String,
        #[arg(long, default_value_t = 128)]
        mesh: i64,
        #[arg(long, default_value_t = 4)]
        boundary_k: i64,
    },
    /// Decide whether a circle with rational squared radius meets the quotient field.
    #[command(alias = "bad-circle")]
    Certify {
        #[arg(long, default_value = "G")]
        ring: String,
        #[arg(long)]
        r2: String,
        #[arg(long, default_value = "0")]
        center: String,
    },
    /// Tabulate best approximations by brute force.
    Oracle {
        #[command(flatten)]
        point: PointArgs,
        /// A surd as JSON: `{"ring": "G", "poly": ["1", "0", "2"], "branch": ...}`.
        #[arg(long, conflicts_with_all = ["poly", "ball"])]
        z: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        qmax: u64,
    },
    /// Assess bounded partial quotients on a trace prefix.
    Assess {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "hurwitz")]
        alg: String,
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(clap::Args, Debug)]
struct PointArgs {
    /// Coefficients `a,b,c` of `az² + bz + c`.
    #[arg(long, conflicts_with = "ball")]
    poly: Option<String>,
    /// A ball `x+yi@r`.
    #[arg(long)]
    ball: Option<String>,
    /// Defaults to the ring of the algorithm.
    #[arg(long)]
    ring: Option<String>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum Suite {
    Identities,
    Monotone,
    #[value(name = "conditionH", alias = "condition-h")]
    ConditionH,
    Neat,
    Appr,
    Forms,
    Geometry,
}

enum Point {
    Surd(QuadraticSurd),
    Ball(String),
}

fn parse_ring(s: &str) -> Result<Ring, CliError> {
    Ok(s.parse::<Ring>()?)
}

fn parse_alg(s: &str) -> Result<AlgorithmSpec, CliError> {
    Ok(s.parse::<AlgorithmSpec>()?)
}

fn parse_poly(ring: Ring, s: &str) -> Result<QuadraticSurd, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(CliError::Input(format!("--poly {s:?}: expected a,b,c")));
    };
    let e = |x: &str| RingElement::parse(ring, x.trim());
    Ok(QuadraticSurd::from_poly(&e(a)?, &e(b)?, &e(c)?, Branch::PositiveImaginary)?)
}

impl PointArgs {
    fn resolve(&self, default_ring: Ring) -> Result<(Ring, Point), CliError> {
        let ring = self.ring.as_deref().map(parse_ring).transpose()?.unwrap_or(default_ring);
        match (&self.poly, &self.ball) {
            (Some(p), None) => Ok((ring, Point::Surd(parse_poly(ring, p)?))),
            (None, Some(b)) => Ok((ring, Point::Ball(b.clone()))),
            _ => Err(CliError::Input("give exactly one of --poly and --ball".into())),
        }
    }
}

fn check_ring(alg: &AlgorithmSpec, ring: Ring) -> Result<(), CliError> {
    if alg.ring() != ring {
        return Err(Error::WrongRing {
            expected: alg.ring(),
            found: ring,
        }
        .into());
    }
    Ok(())
}

fn expand(cfg: &Config, point: &PointArgs, alg: &str, steps: Option<usize>, full: bool) -> Result<ExpansionTrace, CliError> {
    let alg = parse_alg(alg)?;
    let (ring, p) = point.resolve(alg.ring())?;
    check_ring(&alg, ring)?;
    match p {
        Point::Surd(z) => Ok(run_with(
            &z,
            &alg,
            RunOptions {
                budget: steps.unwrap_or(cfg.exact_budget),
                stop_at_period: !full,
            },
        )?),
        Point::Ball(s) => {
            let b = parse_ball(&s, cfg.start_bits)?;
            let opts = BallOptions {
                budget: steps.unwrap_or(cfg.ball_budget),
                start_bits: cfg.start_bits,
                max_bits: cfg.max_bits,
            };
            Ok(run_ball(&FixedBall(b), &alg, opts)?)
        }
    }
}

fn trace_pretty(t: &ExpansionTrace) -> String {
    let mut out = format!("{} under {}\n", t.input, t.algorithm.as_ref().map_or("external".into(), |a| a.to_string()));
    for s in &t.steps {
        out += &format!("{:>4}  a = {:<12} q = {:<24} |q|² = {}\n", s.n, s.a.to_string(), s.q.to_string(), s.q.norm());
    }
    out += &format!("termination: {}\n", serde_json::to_string(&t.termination).expect("serializable"));
    out
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn report(command: &str, cfg: &Config, result: Value) -> Value {
    json!({
        "command": command,
        "config": cfg,
        "generated_at": timestamp(),
        "result": result,
    })
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = cli.max_bits {
        cfg.max_bits = b;
    }
    if let Some(l) = cli.enumeration_limit {
        cfg.enumeration_limit = l;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn suite_text(cfg: &Config, name: &str, outcome: &SuiteOutcome) -> String {
    match cfg.format {
        Format::Json => pretty(&report(&format!("verify {name}"), cfg, outcome.report.clone())),
        Format::Csv => {
            let r = &outcome.report;
            format!(
                "suite,items,violations,passed\n{name},{},{},{}\n",
                r.get("items").unwrap_or(&Value::Null),
                r.get("violations").unwrap_or(&Value::Null),
                outcome.passed
            )
        }
        Format::Pretty => format!("{name}: {}\n", if outcome.passed { "PASS" } else { "FAIL" }) + &pretty(&outcome.report),
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Expand { point, alg, steps, full } => {
            let t = expand(&cfg, point, alg, *steps, *full)?;
            let text = match cfg.format {
                Format::Json => pretty(&report("expand", &cfg, t.to_json())),
                Format::Csv => t.to_csv(),
                Format::Pretty => trace_pretty(&t),
            };
            emit(cli, &text)?;
            let requested = steps.unwrap_or(cfg.ball_budget);
            Ok(match t.termination {
                Termination::PrecisionExhausted { .. } if t.len() < requested => exit::PRECISION,
                _ => exit::OK,
            })
        }
        Command::Verify {
            suite,
            alg,
            corpus,
            alpha,
            max_n,
            check,
            r,
            mesh,
            boundary_k,
        } => {
            let default_alg = match suite {
                Suite::Monotone | Suite::ConditionH => "even",
                _ => "hurwitz",
            };
            let alg = parse_alg(alg.as_deref().unwrap_or(default_alg))?;
            let corpus = match corpus {
                Some(c) => c.parse::<CorpusSpec>()?,
                None => CorpusSpec {
                    count: 100,
                    seed: cfg.seed,
                },
            };
            let args = CorpusArgs {
                alg: &alg,
                corpus,
                config: &cfg,
            };
            let (name, outcome) = match suite {
                Suite::Identities => ("identities", suites::identities(&args)?),
                Suite::Monotone => ("monotone", suites::monotone(&args)?),
                Suite::ConditionH => ("conditionH", suites::condition_h(&args)?),
                Suite::Neat => ("neat", suites::neat(&args, &parse_rat(alpha)?)?),
                Suite::Appr => ("appr", suites::appr(&args, *max_n)?),
                Suite::Forms => ("forms", suites::forms(&args)?),
                Suite::Geometry => ("geometry", suites::geometry(*check, &parse_rat(r)?, *mesh, *boundary_k)?),
            };
            emit(cli, &suite_text(&cfg, name, &outcome))?;
            Ok(if outcome.passed { exit::OK } else { exit::VIOLATION })
        }
        Command::Certify { ring, r2, center } => {
            let ring = parse_ring(ring)?;
            let center = KElem::parse(ring, center)?;
            let cert = certify_bad_circle(&center, &parse_rat(r2)?, ring)?;
            let text = match cfg.format {
                Format::Json | Format::Csv => pretty(&report("certify", &cfg, cert.to_json())),
                Format::Pretty => format!("{}\n", cert.to_json()["verdict"]),
            };
            emit(cli, &text)?;
            Ok(exit::OK)
        }
        Command::Oracle { point, z, qmax } => {
            let (ring, iterate) = match z {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let s: QuadraticSurd =
                        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    (s.ring(), Iterate::Surd(s))
                }
                None => match point.resolve(Ring::Gaussian)? {
                    (ring, Point::Surd(s)) => (ring, Iterate::Surd(s)),
                    (ring, Point::Ball(b)) => (ring, Iterate::Ball(parse_ball(&b, cfg.start_bits)?)),
                },
            };
            let table = best_approx_oracle_in(ring, &iterate, *qmax, cfg.enumeration_limit)?;
            let text = match cfg.format {
                Format::Csv => {
                    let mut s = String::from("q,p,q_norm,dist\n");
                    for r in &table.rows {
                        s += &format!("{},{},{},{}\n", r.q, r.p, r.q.norm(), r.dist());
                    }
                    s
                }
                _ => pretty(&report("oracle", &cfg, table.to_json())),
            };
            emit(cli, &text)?;
            Ok(exit::OK)
        }
        Command::Assess { point, alg, steps } => {
            let t = expand(&cfg, point, alg, *steps, false)?;
            let rep = badly_approximable_assess(&t)?;
            emit(cli, &pretty(&report("assess", &cfg, rep.to_json())))?;
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
