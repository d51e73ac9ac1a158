//! Online learners behind one decision interface.
//!
//! A learner is driven round by round: [`Learner::decide`] emits the round's
//! decision from past observations only, then [`Learner::observe`] receives
//! the loss object the adversary chose. Hedge learners see loss vectors in
//! `[0,1]^N` and emit distributions (or, when randomized, single actions);
//! ball learners see points `w` of the unit ball and pay `w . x`.

mod ball;
mod doubling;
mod exp_weights;
mod fpl;
mod hedge;
mod spec;

use rand::{Rng, RngCore};

use crate::error::Result;
use crate::types::ActionDistribution;

pub use ball::{ball_adaptive_coefficient, BallAdaptive, BallMinimax, LastRoundBall, OgdBall};
pub use doubling::{Doubling, LearnerFactory};
pub use exp_weights::{softmax_weights, ExpWeights, ExpWeightsMode, FirstOrder};
pub use fpl::{
    fpl_density, fpl_normalization_estimate, fpl_radial_cdf, FplPretend, PerturbationSample,
};
pub use hedge::{leader_deviation, FixedMinimaxHedge, LastRoundHedge, PriorAveragedHedge};
pub use spec::LearnerSpec;
pub(crate) use spec::{fmt_spec, parse_spec};

/// Which game a learner plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    /// Loss vectors in `[0,1]^N`, decisions over `N` actions.
    Hedge,
    /// Linear losses `w . x` over the unit ball of `R^N`.
    Ball,
}

/// One round's output.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Distribution(ActionDistribution),
    /// A single action drawn by a randomized learner.
    Action(usize),
    Point(Vec<f64>),
}

impl Decision {
    /// Loss incurred against `z`.
    pub fn loss(&self, z: &[f64]) -> f64 {
        match self {
            Decision::Distribution(p) => p.dot(z),
            Decision::Action(i) => z[*i],
            Decision::Point(x) => x.iter().zip(z).map(|(a, b)| a * b).sum(),
        }
    }
}

pub trait Learner: Send {
    fn setting(&self) -> Setting;

    fn n(&self) -> usize;

    /// Spec-style label, e.g. `exp_weights:mode=pretend,d=4,b=5.6`.
    fn name(&self) -> String;

    /// Decision for the current round. Randomized learners draw from `rng`.
    fn decide(&mut self, rng: &mut dyn RngCore) -> Result<Decision>;

    /// Records the round's loss object and advances to the next round.
    fn observe(&mut self, loss: &[f64]) -> Result<()>;

    fn boxed_clone(&self) -> Box<dyn Learner>;

    /// `true` when decisions are single drawn actions.
    fn is_randomized(&self) -> bool {
        false
    }
}

impl Clone for Box<dyn Learner> {
    fn clone(&self) -> Self {
        self.boxed_clone()
    }
}

/// Draws an action from `p` with one uniform variate from `rng`.
pub fn sample_action<R: Rng + ?Sized>(p: &ActionDistribution, rng: &mut R) -> usize {
    p.sample_with(rng.gen::<f64>())
}

/// Wraps a distribution-emitting Hedge learner so that each round it plays a
/// single action drawn from its distribution.
#[derive(Clone)]
pub struct Sampled {
    inner: Box<dyn Learner>,
}

impl Sampled {
    pub fn new(inner: Box<dyn Learner>) -> Self {
        Sampled { inner }
    }
}

impl Learner for Sampled {
    fn setting(&self) -> Setting {
        self.inner.setting()
    }

    fn n(&self) -> usize {
        self.inner.n()
    }

    fn name(&self) -> String {
        format!("sampled({})", self.inner.name())
    }

    fn decide(&mut self, rng: &mut dyn RngCore) -> Result<Decision> {
        match self.inner.decide(rng)? {
            Decision::Distribution(p) => Ok(Decision::Action(sample_action(&p, rng))),
            other => Ok(other),
        }
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        self.inner.observe(loss)
    }

    fn boxed_clone(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }

    fn is_randomized(&self) -> bool {
        true
    }
}

pub(crate) fn check_loss(n: usize, loss: &[f64]) -> Result<()> {
    if loss.len() != n {
        return Err(crate::error::Error::SettingMismatch(format!(
            "loss has {} entries, learner plays {} actions",
            loss.len(),
            n
        )));
    }
    Ok(())
}
