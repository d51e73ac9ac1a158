//! Horizon-free online learning.
//!
//! Exact minimax values for the Hedge game, small-game solving by linear
//! programming, power-law "pretend" horizon priors, and a family of anytime
//! learners that average fixed-horizon strategies over such a prior. The
//! [`arena`] module runs learners against adversaries and records regret.

pub mod arena;
pub mod error;
pub mod game_solver;
pub mod hedge_values;
pub mod learners;
pub mod numeric;
pub mod priors;
pub mod types;

pub use error::{Error, Result};
pub use types::{ActionDistribution, CumulativeLossVector};
