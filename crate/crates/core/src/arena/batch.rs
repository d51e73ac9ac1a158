//! Max-over-trials regret curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_trial, AdversarySpec};
use crate::error::{Error, Result};
use crate::learners::LearnerSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatchConfig {
    pub learners: Vec<LearnerSpec>,
    pub adversary: AdversarySpec,
    pub n: usize,
    pub horizon: u64,
    pub trials: usize,
    /// Rounds to report; empty means every round.
    #[serde(default)]
    pub grid: Vec<u64>,
    pub seed_base: u64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

fn default_parallelism() -> usize {
    1
}

/// `max_regret[k][j]`: the largest regret of learner `k` after round `rounds[j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxRegretTable {
    pub learners: Vec<String>,
    pub rounds: Vec<u64>,
    pub max_regret: Vec<Vec<f64>>,
}

impl MaxRegretTable {
    pub fn learner_index(&self, label: &str) -> Option<usize> {
        self.learners.iter().position(|l| l == label)
    }

    pub fn at(&self, learner: usize, round: u64) -> Option<f64> {
        let j = self.rounds.iter().position(|&r| r == round)?;
        Some(self.max_regret[learner][j])
    }
}

/// Runs every learner against the same adversary streams in each trial and
/// takes the per-round maximum over trials.
///
/// The result does not depend on `parallelism`: trials use counter-derived
/// streams and the maximum is folded in trial order.
pub fn max_regret_curve(config: &TrialBatchConfig) -> Result<MaxRegretTable> {
    if config.trials == 0 || config.learners.is_empty() || config.horizon == 0 {
        return Err(Error::domain(
            "batch needs trials, learners and a positive horizon",
        ));
    }
    let rounds: Vec<u64> = if config.grid.is_empty() {
        (1..=config.horizon).collect()
    } else {
        config.grid.clone()
    };
    if rounds.iter().any(|&r| r == 0 || r > config.horizon) {
        return Err(Error::domain("grid rounds must lie in 1..=horizon"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    let per_trial: Vec<Vec<Vec<f64>>> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                config
                    .learners
                    .iter()
                    .map(|spec| {
                        let mut learner = spec.build(config.n)?;
                        let mut adversary = config.adversary.build(config.n, learner.setting())?;
                        let trace = run_trial(
                            learner.as_mut(),
                            adversary.as_mut(),
                            config.horizon,
                            config.seed_base,
                            trial as u64,
                        )?;
                        Ok(rounds
                            .iter()
                            .map(|&r| trace.rows[r as usize - 1].regret)
                            .collect())
                    })
                    .collect::<Result<Vec<Vec<f64>>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut max_regret = vec![vec![f64::NEG_INFINITY; rounds.len()]; config.learners.len()];
    for trial in &per_trial {
        for (acc, row) in max_regret.iter_mut().zip(trial) {
            acc.iter_mut().zip(row).for_each(|(a, &v)| *a = a.max(v));
        }
    }
    Ok(MaxRegretTable {
        learners: config.learners.iter().map(ToString::to_string).collect(),
        rounds,
        max_regret,
    })
}
