use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// Run settings; read from TOML, then overridden by flags, then echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Precision ceiling for ball runs, in bits.
    pub max_bits: u32,
    /// Starting precision for ball runs, in bits.
    pub start_bits: u32,
    pub exact_budget: usize,
    pub ball_budget: usize,
    /// Largest norm bound any enumeration may use.
    pub enumeration_limit: u64,
    pub format: Format,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_bits: 8192,
            start_bits: 128,
            exact_budget: ccf::expansion::EXACT_BUDGET,
            ball_budget: ccf::expansion::BALL_BUDGET,
            enumeration_limit: ccf::approximation::ENUMERATION_LIMIT,
            format: Format::Json,
            seed: ccf::corpus::DEFAULT_SEED,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("max_bits", self.max_bits as u64),
            ("start_bits", self.start_bits as u64),
            ("exact_budget", self.exact_budget as u64),
            ("ball_budget", self.ball_budget as u64),
            ("enumeration_limit", self.enumeration_limit),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Input(format!("{name} must be positive")));
        }
        if self.start_bits > self.max_bits {
            return Err(CliError::Input("start_bits exceeds max_bits".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_toml_keeps_defaults() {
        let c: Config = toml::from_str("seed = 11\nformat = \"csv\"").unwrap();
        assert_eq!(c.seed, 11);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.exact_budget, Config::default().exact_budget);
        assert!(toml::from_str::<Config>("nonsense = 1").is_err());
    }

    #[test]
    fn zero_limits_are_rejected() {
        let c = Config {
            ball_budget: 0,
            ..Config::default()
        };
        assert!(c.validate().is_err());
    }
}
