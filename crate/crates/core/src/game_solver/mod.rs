//! Exact minimax solving for small Hedge games over finite loss spaces.
//!
//! Each node of the game tree is a stage game `min_P max_Z (P.Z + cont(Z))`
//! solved as a linear program. Values are memoized on shifted (and, for
//! permutation-closed spaces, sorted) loss offsets.

mod lower_bound;
mod lp;
mod space;

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::priors::FinitePrior;
use crate::types::{ActionDistribution, CumulativeLossVector};

pub use lower_bound::{
    generating_function_check, generating_function_partial_sums, scaled_lower_bound,
    scaled_lower_bound_closed_form, ScaledRegretTable,
};
pub use lp::{min_norm_optimum, solve_min_max};
pub use space::FiniteLossSpace;

/// Default cap on stage-game solves per solver.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;
/// Slack used when selecting the least-norm point of the optimal face.
const FACE_TOL: f64 = 1e-10;

/// Optimal distribution and value of one stage game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageGameSolution {
    pub distribution: ActionDistribution,
    pub value: f64,
}

/// Solves `min_P max_k (P . Z_k + continuations[k])` over the vectors of `space`.
///
/// Among optimal distributions the one of least Euclidean norm is returned.
pub fn solve_stage(space: &FiniteLossSpace, continuations: &[f64]) -> Result<StageGameSolution> {
    let c = stage_matrix(space, continuations)?;
    let (value, p) = solve_min_max(&c)?;
    let p = min_norm_optimum(&c, value, &p, FACE_TOL);
    let worst = c
        .iter()
        .map(|row| row.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    if (worst - value).abs() > 1e-9 {
        return Err(Error::Numerical(format!(
            "stage solution misses LP value by {}",
            worst - value
        )));
    }
    Ok(StageGameSolution {
        distribution: ActionDistribution::new(p)?,
        value,
    })
}

fn stage_value(space: &FiniteLossSpace, continuations: &[f64]) -> Result<f64> {
    Ok(solve_min_max(&stage_matrix(space, continuations)?)?.0)
}

fn stage_matrix(space: &FiniteLossSpace, continuations: &[f64]) -> Result<Vec<Vec<f64>>> {
    if continuations.len() != space.len() {
        return Err(Error::domain(format!(
            "{} continuations for a space of {} vectors",
            continuations.len(),
            space.len()
        )));
    }
    Ok(space
        .vectors()
        .iter()
        .zip(continuations)
        .map(|(z, &c)| z.iter().map(|&x| x + c).collect())
        .collect())
}

/// Memo key: offsets from the minimum, capped at the number of remaining
/// rounds and sorted when the space is permutation-closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct StateKey {
    offsets: Vec<u64>,
    stage: u64,
}

fn normalize(
    space: &FiniteLossSpace,
    m: &[f64],
    cap: f64,
    stage: u64,
) -> (StateKey, Vec<f64>, f64) {
    let shift = m.iter().copied().fold(f64::INFINITY, f64::min);
    let mut offsets: Vec<f64> = m.iter().map(|&x| (x - shift).min(cap)).collect();
    if space.is_symmetric() {
        offsets.sort_by(f64::total_cmp);
    }
    let key = StateKey {
        offsets: offsets.iter().map(|x| x.to_bits()).collect(),
        stage,
    };
    (key, offsets, shift)
}

fn neg_min(m: &[f64]) -> f64 {
    -m.iter().copied().fold(f64::INFINITY, f64::min)
}

fn plus(m: &[f64], z: &[f64]) -> Vec<f64> {
    m.iter().zip(z).map(|(a, b)| a + b).collect()
}

/// Fixed-horizon game solver: `V(M, 0) = -min_i M_i` and
/// `V(M, r) = min_P max_Z (P.Z + V(M + Z, r - 1))`.
///
/// The memo sits behind a mutex that is never held across recursion, so a
/// solver may be shared between threads.
#[derive(Debug)]
pub struct ExactSolver {
    space: FiniteLossSpace,
    node_budget: usize,
    nodes: AtomicUsize,
    memo: Mutex<HashMap<StateKey, f64>>,
}

impl ExactSolver {
    pub fn new(space: FiniteLossSpace) -> Self {
        Self::with_budget(space, DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(space: FiniteLossSpace, node_budget: usize) -> Self {
        ExactSolver {
            space,
            node_budget,
            nodes: AtomicUsize::new(0),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn space(&self) -> &FiniteLossSpace {
        &self.space
    }

    /// Stage games solved so far.
    pub fn nodes(&self) -> usize {
        self.nodes.load(Ordering::Relaxed)
    }

    fn charge(&self) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.node_budget {
            return Err(Error::Budget {
                what: "stage-game node",
                limit: self.node_budget,
            });
        }
        Ok(())
    }

    fn check(&self, m: &CumulativeLossVector) -> Result<()> {
        if m.n() != self.space.n() {
            return Err(Error::SettingMismatch(format!(
                "state has {} actions, loss space has {}",
                m.n(),
                self.space.n()
            )));
        }
        Ok(())
    }

    /// Exact minimax value `V(M, r)`.
    pub fn value(&self, m: &CumulativeLossVector, r: u32) -> Result<f64> {
        self.check(m)?;
        self.value_raw(m.losses(), r)
    }

    fn value_raw(&self, m: &[f64], r: u32) -> Result<f64> {
        if r == 0 {
            return Ok(neg_min(m));
        }
        let (key, offsets, shift) = normalize(&self.space, m, r as f64, r as u64);
        if let Some(&v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(v - shift);
        }
        let conts = self.continuations(&offsets, r)?;
        self.charge()?;
        let v = stage_value(&self.space, &conts)?;
        self.memo.lock().expect("memo lock").insert(key, v);
        Ok(v - shift)
    }

    fn continuations(&self, m: &[f64], r: u32) -> Result<Vec<f64>> {
        self.space
            .vectors()
            .iter()
            .map(|z| self.value_raw(&plus(m, z), r - 1))
            .collect()
    }

    /// Optimal first-stage distribution and value with `r >= 1` rounds left.
    pub fn solution(&self, m: &CumulativeLossVector, r: u32) -> Result<StageGameSolution> {
        self.check(m)?;
        if r == 0 {
            return Err(Error::domain(
                "a stage solution needs at least one remaining round",
            ));
        }
        let conts = self.continuations(m.losses(), r)?;
        self.charge()?;
        solve_stage(&self.space, &conts)
    }
}

/// `V(M, r)` for `space` with a fresh solver and the default budget.
pub fn exact_v(space: &FiniteLossSpace, m: &CumulativeLossVector, r: u32) -> Result<f64> {
    ExactSolver::new(space.clone()).value(m, r)
}

/// Value recursion for a finitely supported horizon prior:
/// `V̄_t(M) = min_P max_Z (P.Z + q_t V(M + Z, 0) + (1 - q_t) V̄_{t+1}(M + Z))`
/// with `q_t = Pr[T = t | T >= t]`.
#[derive(Debug)]
pub struct RandomHorizonSolver {
    space: FiniteLossSpace,
    prior: FinitePrior,
    node_budget: usize,
    nodes: AtomicUsize,
    memo: Mutex<HashMap<StateKey, f64>>,
}

impl RandomHorizonSolver {
    pub fn new(space: FiniteLossSpace, prior: FinitePrior) -> Self {
        RandomHorizonSolver {
            space,
            prior,
            node_budget: DEFAULT_NODE_BUDGET,
            nodes: AtomicUsize::new(0),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_budget(mut self, node_budget: usize) -> Self {
        self.node_budget = node_budget;
        self
    }

    fn stop_prob(&self, t: u64) -> Result<f64> {
        let tail = self.prior.tail(t);
        if tail <= 0.0 {
            return Err(Error::domain(format!(
                "round {t} lies beyond the prior's largest horizon {}",
                self.prior.max_horizon()
            )));
        }
        Ok(self.prior.pmf(t) / tail)
    }

    fn continuations(&self, t: u64, m: &[f64]) -> Result<Vec<f64>> {
        let q = self.stop_prob(t)?;
        self.space
            .vectors()
            .iter()
            .map(|z| {
                let next = plus(m, z);
                let mut c = q * neg_min(&next);
                if q < 1.0 {
                    c += (1.0 - q) * self.value_raw(t + 1, &next)?;
                }
                Ok(c)
            })
            .collect()
    }

    fn value_raw(&self, t: u64, m: &[f64]) -> Result<f64> {
        let cap = (self.prior.max_horizon() + 1).saturating_sub(t) as f64;
        let (key, offsets, shift) = normalize(&self.space, m, cap, t);
        if let Some(&v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(v - shift);
        }
        let conts = self.continuations(t, &offsets)?;
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.node_budget {
            return Err(Error::Budget {
                what: "stage-game node",
                limit: self.node_budget,
            });
        }
        let v = stage_value(&self.space, &conts)?;
        self.memo.lock().expect("memo lock").insert(key, v);
        Ok(v - shift)
    }

    /// `V̄_t(M)` with the optimal stage distribution at `(t, M)`.
    pub fn solve(&self, t: u64, m: &CumulativeLossVector) -> Result<StageGameSolution> {
        if m.n() != self.space.n() {
            return Err(Error::SettingMismatch(
                "state and loss space differ in N".into(),
            ));
        }
        if t == 0 {
            return Err(Error::domain("rounds are numbered from 1"));
        }
        let conts = self.continuations(t, m.losses())?;
        solve_stage(&self.space, &conts)
    }
}

pub fn random_horizon_value(
    space: &FiniteLossSpace,
    prior: &FinitePrior,
    t: u64,
    m: &CumulativeLossVector,
) -> Result<StageGameSolution> {
    RandomHorizonSolver::new(space.clone(), prior.clone()).solve(t, m)
}

/// `E[P^T | T >= t]`: fixed-horizon optimal distributions at `(t, M)`
/// averaged under the conditional prior.
pub fn conditional_average_distribution(
    space: &FiniteLossSpace,
    prior: &FinitePrior,
    t: u64,
    m: &CumulativeLossVector,
) -> Result<ActionDistribution> {
    let solver = ExactSolver::new(space.clone());
    let tail = prior.tail(t);
    if tail <= 0.0 {
        return Err(Error::domain(format!(
            "round {t} lies beyond the prior's support"
        )));
    }
    let mut avg = vec![0.0; space.n()];
    for &(big_t, w) in prior.support().iter().filter(|&&(s, _)| s >= t) {
        let sol = solver.solution(m, (big_t - t + 1) as u32)?;
        avg.iter_mut()
            .zip(sol.distribution.weights())
            .for_each(|(a, p)| *a += w / tail * p);
    }
    ActionDistribution::new(avg)
}
