//! Experiment documents for `bench`.
//!
//! ```toml
//! schema_version = 1
//!
//! [bench]
//! learners = ["ball_adaptive", "ogd", "doubling:base=ball_minimax", "ball_minimax:T=1000"]
//! adversary = "sphere"
//! n = 10
//! horizon = 1000
//! trials = 200
//! seed = 20240601
//! parallelism = 4
//!
//! [output]
//! dir = "results"
//! name = "ball_curves"
//! trace_trials = 1
//! ```

use std::path::{Path, PathBuf};

use horizon_core::arena::{AdversarySpec, TrialBatchConfig};
use horizon_core::learners::LearnerSpec;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub bench: BenchSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    pub learners: Vec<LearnerSpec>,
    pub adversary: AdversarySpec,
    pub n: usize,
    pub horizon: u64,
    pub trials: usize,
    #[serde(default)]
    pub grid: Vec<u64>,
    pub seed: u64,
    #[serde(default)]
    pub parallelism: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_name")]
    pub name: String,
    /// Per-trial traces to export for each learner, starting at trial 0.
    #[serde(default)]
    pub trace_trials: usize,
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}

fn default_name() -> String {
    "max_regret".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_dir(),
            name: default_name(),
            trace_trials: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let b = &self.bench;
        if b.learners.is_empty() {
            return Err(CliError::config("bench.learners is empty"));
        }
        if b.n < 2 || b.horizon == 0 || b.trials == 0 {
            return Err(CliError::config(
                "bench needs n >= 2, horizon >= 1 and trials >= 1",
            ));
        }
        if let Some(bad) = b.grid.iter().find(|&&r| r == 0 || r > b.horizon) {
            return Err(CliError::config(format!(
                "grid round {bad} lies outside 1..={}",
                b.horizon
            )));
        }
        if b.parallelism == Some(0) {
            return Err(CliError::config("parallelism must be at least 1"));
        }
        if self.output.name.is_empty() || self.output.name.contains(['/', '\\']) {
            return Err(CliError::config("output.name must be a plain file stem"));
        }
        if self.output.trace_trials > b.trials {
            return Err(CliError::config("output.trace_trials exceeds bench.trials"));
        }
        let setting = b.learners[0].setting();
        if let Some(other) = b.learners.iter().find(|l| l.setting() != setting) {
            return Err(CliError::config(format!(
                "learner {other} plays a different game than {}",
                b.learners[0]
            )));
        }
        Ok(())
    }

    pub fn batch(&self) -> TrialBatchConfig {
        let b = &self.bench;
        TrialBatchConfig {
            learners: b.learners.clone(),
            adversary: b.adversary.clone(),
            n: b.n,
            horizon: b.horizon,
            trials: b.trials,
            grid: b.grid.clone(),
            seed_base: b.seed,
            parallelism: b.parallelism.unwrap_or_else(default_parallelism),
        }
    }
}

pub fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
schema_version = 1
[bench]
learners = ["ball_adaptive", "ogd"]
adversary = "sphere"
n = 3
horizon = 10
trials = 2
seed = 5
"#;

    #[test]
    fn parses_minimal_document() {
        let c = ExperimentConfig::parse(GOOD).unwrap();
        assert_eq!(c.bench.learners.len(), 2);
        assert_eq!(c.output.name, "max_regret");
        assert_eq!(c.batch().seed_base, 5);
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        let extra = GOOD.replace("seed = 5", "seed = 5\ncolour = 1");
        assert!(matches!(
            ExperimentConfig::parse(&extra),
            Err(CliError::Config(_))
        ));
        let v2 = GOOD.replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(
            ExperimentConfig::parse(&v2),
            Err(CliError::Config(_))
        ));
        let bad = GOOD.replace("\"ogd\"", "\"nope\"");
        assert!(matches!(
            ExperimentConfig::parse(&bad),
            Err(CliError::Config(_))
        ));
        let mixed = GOOD.replace("\"ogd\"", "\"pretend_hedge\"");
        assert!(matches!(
            ExperimentConfig::parse(&mixed),
            Err(CliError::Config(_))
        ));
    }
}
