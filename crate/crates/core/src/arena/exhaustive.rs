//! Worst case of a deterministic Hedge learner over every adversary sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game_solver::FiniteLossSpace;
use crate::learners::{Decision, Learner, Setting};
use crate::types::CumulativeLossVector;

pub const DEFAULT_SEARCH_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub regret: f64,
    /// Indices into the loss space's vectors.
    pub sequence: Vec<usize>,
}

/// Enumerates all `|space|^horizon` loss sequences against `learner`.
///
/// Each game-tree node calls `decide` once, so at most
/// `Σ_{k<horizon} |space|^k` decisions are made; that count must fit `budget`.
pub fn exhaustive_adversary_search(
    learner: &dyn Learner,
    space: &FiniteLossSpace,
    horizon: u64,
    budget: usize,
) -> Result<WorstCase> {
    if learner.is_randomized() {
        return Err(Error::domain(
            "exhaustive search needs a deterministic learner",
        ));
    }
    if learner.setting() != Setting::Hedge || learner.n() != space.n() {
        return Err(Error::SettingMismatch(
            "exhaustive search runs Hedge learners on a matching space".into(),
        ));
    }
    let mut nodes = 0usize;
    let mut level = 1usize;
    for _ in 0..horizon {
        nodes = nodes.saturating_add(level);
        level = level.saturating_mul(space.len());
    }
    if nodes > budget {
        return Err(Error::Budget {
            what: "exhaustive search",
            limit: budget,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut path = Vec::with_capacity(horizon as usize);
    search(
        learner.boxed_clone(),
        space,
        horizon,
        CumulativeLossVector::zeros(space.n()),
        0.0,
        &mut path,
        &mut rng,
    )
}

fn search(
    mut learner: Box<dyn Learner>,
    space: &FiniteLossSpace,
    left: u64,
    m: CumulativeLossVector,
    loss: f64,
    path: &mut Vec<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<WorstCase> {
    if left == 0 {
        return Ok(WorstCase {
            regret: m.regret(loss),
            sequence: path.clone(),
        });
    }
    let p = match learner.decide(rng)? {
        Decision::Distribution(p) => p,
        _ => {
            return Err(Error::domain(
                "exhaustive search needs distribution decisions",
            ))
        }
    };
    let mut worst: Option<WorstCase> = None;
    for (i, z) in space.vectors().iter().enumerate() {
        let mut child = if i + 1 == space.len() {
            std::mem::replace(&mut learner, Box::new(Placeholder))
        } else {
            learner.boxed_clone()
        };
        child.observe(z)?;
        path.push(i);
        let w = search(
            child,
            space,
            left - 1,
            m.plus(z),
            loss + p.dot(z),
            path,
            rng,
        )?;
        path.pop();
        if worst.as_ref().is_none_or(|b| w.regret > b.regret) {
            worst = Some(w);
        }
    }
    Ok(worst.expect("loss spaces are nonempty"))
}

/// Stand-in left behind when the last branch takes ownership of the learner.
struct Placeholder;

impl Learner for Placeholder {
    fn setting(&self) -> Setting {
        Setting::Hedge
    }
    fn n(&self) -> usize {
        0
    }
    fn name(&self) -> String {
        String::new()
    }
    fn decide(&mut self, _rng: &mut dyn rand::RngCore) -> Result<Decision> {
        unreachable!("placeholder learners are never played")
    }
    fn observe(&mut self, _loss: &[f64]) -> Result<()> {
        unreachable!("placeholder learners are never played")
    }
    fn boxed_clone(&self) -> Box<dyn Learner> {
        Box::new(Placeholder)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hedge_values::two_action_game_value;
    use crate::learners::{FixedMinimaxHedge, FplPretend, LearnerSpec, PriorAveragedHedge};

    #[test]
    fn fixed_minimax_attains_game_value() {
        let l = FixedMinimaxHedge::new(2, 6).unwrap();
        let w =
            exhaustive_adversary_search(&l, &FiniteLossSpace::basis(2), 6, DEFAULT_SEARCH_BUDGET)
                .unwrap();
        assert!((w.regret - two_action_game_value(6)).abs() < 1e-12);
        assert_eq!(w.sequence.len(), 6);
    }

    #[test]
    fn pretend_cannot_beat_minimax() {
        let l = PriorAveragedHedge::pretend(2, 2.35).unwrap();
        let w =
            exhaustive_adversary_search(&l, &FiniteLossSpace::basis(2), 8, DEFAULT_SEARCH_BUDGET)
                .unwrap();
        assert!(w.regret >= two_action_game_value(8) - 1e-12);
    }

    #[test]
    fn one_round_worst_case() {
        // after one basis loss the best action has loss 0, so the worst case is max_i P_1,i
        for (spec, n, expected) in [
            ("exp_weights", 2, 0.5),
            ("pretend_hedge", 2, 0.5),
            ("exp_weights", 3, 1.0 / 3.0),
            ("first_order", 3, 1.0 / 3.0),
        ] {
            let l = spec.parse::<LearnerSpec>().unwrap().build(n).unwrap();
            let w =
                exhaustive_adversary_search(l.as_ref(), &FiniteLossSpace::basis(n), 1, 10).unwrap();
            assert!((w.regret - expected).abs() < 1e-12, "{spec}");
        }
    }

    #[test]
    fn rejects_randomized_and_oversized() {
        let l = FplPretend::with_defaults(2).unwrap();
        assert!(exhaustive_adversary_search(&l, &FiniteLossSpace::basis(2), 2, 100).is_err());
        let l = FixedMinimaxHedge::new(2, 30).unwrap();
        let e = exhaustive_adversary_search(&l, &FiniteLossSpace::basis(2), 30, 1000).unwrap_err();
        assert!(e.is_budget());
    }
}
