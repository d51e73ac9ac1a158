//! The doubling trick: run a fixed-horizon learner with guesses `1, 2, 4, ...`
//! and restart it whenever a guess runs out.

use std::sync::Arc;

use rand::RngCore;

use super::{Decision, Learner, Setting};
use crate::error::Result;

/// Builds a fresh fixed-horizon learner for a guessed horizon.
pub type LearnerFactory = Arc<dyn Fn(u64) -> Result<Box<dyn Learner>> + Send + Sync>;

#[derive(Clone)]
pub struct Doubling {
    factory: LearnerFactory,
    base: String,
    initial: u64,
    guess: u64,
    /// Rounds already played in the current epoch.
    used: u64,
    inner: Box<dyn Learner>,
}

impl Doubling {
    /// `base` names the wrapped learner in [`Learner::name`].
    pub fn new(factory: LearnerFactory, base: impl Into<String>) -> Result<Self> {
        Self::with_initial(factory, base, 1)
    }

    pub fn with_initial(
        factory: LearnerFactory,
        base: impl Into<String>,
        initial: u64,
    ) -> Result<Self> {
        let initial = initial.max(1);
        let inner = factory(initial)?;
        Ok(Doubling {
            factory,
            base: base.into(),
            initial,
            guess: initial,
            used: 0,
            inner,
        })
    }

    pub fn guess(&self) -> u64 {
        self.guess
    }

    /// Rounds played inside the current epoch.
    pub fn epoch_round(&self) -> u64 {
        self.used
    }
}

impl Learner for Doubling {
    fn setting(&self) -> Setting {
        self.inner.setting()
    }

    fn n(&self) -> usize {
        self.inner.n()
    }

    fn name(&self) -> String {
        format!("doubling:base={}", self.base)
    }

    fn decide(&mut self, rng: &mut dyn RngCore) -> Result<Decision> {
        if self.used == self.guess {
            self.guess *= 2;
            self.used = 0;
            self.inner = (self.factory)(self.guess)?;
        }
        self.inner.decide(rng)
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        self.inner.observe(loss)?;
        self.used += 1;
        Ok(())
    }

    fn boxed_clone(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }

    fn is_randomized(&self) -> bool {
        self.inner.is_randomized()
    }
}

impl std::fmt::Debug for Doubling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Doubling")
            .field("base", &self.base)
            .field("initial", &self.initial)
            .field("guess", &self.guess)
            .field("used", &self.used)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{BallMinimax, FixedMinimaxHedge};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Mutex;

    #[test]
    fn epoch_boundaries() {
        let starts = Arc::new(Mutex::new(Vec::new()));
        let log = starts.clone();
        let factory: LearnerFactory = Arc::new(move |t| {
            log.lock().unwrap().push(t);
            Ok(Box::new(FixedMinimaxHedge::new(2, t)?) as Box<dyn Learner>)
        });
        let mut l = Doubling::new(factory, "fixed_minimax").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut restarts = Vec::new();
        for round in 1..=16u64 {
            let before = starts.lock().unwrap().len();
            l.decide(&mut rng).unwrap();
            if starts.lock().unwrap().len() > before {
                restarts.push(round - 1);
            }
            l.observe(&[1.0, 0.0]).unwrap();
        }
        assert_eq!(restarts, vec![1, 3, 7, 15]);
        assert_eq!(*starts.lock().unwrap(), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn inner_never_passes_its_horizon() {
        // the inner learner errors past its horizon, so a clean run is the check
        let factory: LearnerFactory =
            Arc::new(|t| Ok(Box::new(BallMinimax::new(3, t)) as Box<dyn Learner>));
        let mut l = Doubling::new(factory, "ball_minimax").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 0..200 {
            l.decide(&mut rng).unwrap();
            let s = if k % 3 == 0 { 1.0 } else { -0.5 };
            l.observe(&[s, 0.0, 0.0]).unwrap();
            assert!(l.epoch_round() <= l.guess());
        }
    }
}
