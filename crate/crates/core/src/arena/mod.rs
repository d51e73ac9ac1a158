//! Games between learners and adversaries, regret traces, batch max-regret
//! curves and exhaustive worst-case search over small loss spaces.

mod adversary;
mod batch;
mod exhaustive;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use adversary::{
    check_legal, Adversary, AdversarySpec, AlternatingBasis, AlternatingSign, Greedy, RandomBall,
    RandomBasis, RandomCube, Replay, Zero,
};
pub use batch::{max_regret_curve, MaxRegretTable, TrialBatchConfig};
pub use exhaustive::{exhaustive_adversary_search, WorstCase, DEFAULT_SEARCH_BUDGET};

use crate::error::{Error, Result};
use crate::learners::{Learner, Setting};
use crate::types::l2_norm;

/// One round of a trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub round: u64,
    pub loss: f64,
    pub cum_loss: f64,
    /// `min_i M_{t,i}` for Hedge, `-||W_t||` for the ball game.
    pub comparator: f64,
    pub regret: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegretTrace {
    pub learner: String,
    pub adversary: String,
    pub setting: Setting,
    pub seed: u64,
    pub trial: u64,
    pub rows: Vec<TraceRow>,
    /// The adversary's loss objects, round by round.
    #[serde(skip)]
    pub losses: Vec<Vec<f64>>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.regret)
    }

    /// Regret after round `t` (1-based).
    pub fn regret_at(&self, t: u64) -> Option<f64> {
        self.rows
            .get((t as usize).checked_sub(1)?)
            .map(|r| r.regret)
    }

    /// Recomputes the final comparator from the stored losses.
    pub fn recomputed_comparator(&self) -> f64 {
        let n = self.losses.first().map_or(0, Vec::len);
        let mut total = vec![0.0; n];
        for z in &self.losses {
            total.iter_mut().zip(z).for_each(|(a, b)| *a += b);
        }
        match self.setting {
            Setting::Hedge => total.iter().copied().fold(f64::INFINITY, f64::min),
            Setting::Ball => -l2_norm(&total),
        }
    }
}

/// Learner and adversary streams for trial `trial` under `seed_base`.
///
/// Both derive from one ChaCha key with distinct stream ids, so a trial's
/// randomness never depends on scheduling.
pub fn trial_rngs(seed_base: u64, trial: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut learner = ChaCha8Rng::seed_from_u64(seed_base);
    let mut adversary = learner.clone();
    learner.set_stream(2 * trial + 1);
    adversary.set_stream(2 * trial);
    (learner, adversary)
}

/// Plays `horizon` rounds with the streams of trial 0 under `seed`.
pub fn run_game(
    learner: &mut dyn Learner,
    adversary: &mut dyn Adversary,
    horizon: u64,
    seed: u64,
) -> Result<RegretTrace> {
    run_trial(learner, adversary, horizon, seed, 0)
}

pub fn run_trial(
    learner: &mut dyn Learner,
    adversary: &mut dyn Adversary,
    horizon: u64,
    seed_base: u64,
    trial: u64,
) -> Result<RegretTrace> {
    let setting = learner.setting();
    if adversary.setting() != setting || adversary.n() != learner.n() {
        return Err(Error::SettingMismatch(format!(
            "{} plays {:?} with N={}, {} plays {:?} with N={}",
            learner.name(),
            setting,
            learner.n(),
            adversary.name(),
            adversary.setting(),
            adversary.n()
        )));
    }
    let (mut lrng, mut arng) = trial_rngs(seed_base, trial);
    let n = learner.n();
    let mut total = vec![0.0; n];
    let mut cum_loss = 0.0;
    let mut rows = Vec::with_capacity(horizon as usize);
    let mut losses = Vec::with_capacity(horizon as usize);
    for round in 1..=horizon {
        let decision = learner.decide(&mut lrng)?;
        let z = adversary.respond(round, &decision, &mut arng)?;
        check_legal(setting, &z)?;
        let loss = decision.loss(&z);
        learner.observe(&z)?;
        cum_loss += loss;
        total.iter_mut().zip(&z).for_each(|(a, b)| *a += b);
        let comparator = match setting {
            Setting::Hedge => total.iter().copied().fold(f64::INFINITY, f64::min),
            Setting::Ball => -l2_norm(&total),
        };
        rows.push(TraceRow {
            round,
            loss,
            cum_loss,
            comparator,
            regret: cum_loss - comparator,
        });
        losses.push(z);
    }
    Ok(RegretTrace {
        learner: learner.name(),
        adversary: adversary.name(),
        setting,
        seed: seed_base,
        trial,
        rows,
        losses,
    })
}
