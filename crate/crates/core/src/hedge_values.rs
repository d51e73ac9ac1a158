//! Fixed-horizon minimax values for the Hedge game over the basis-vector loss
//! space `{e_1, ..., e_N}`.
//!
//! The minimax value is `V(M, r) = r/N - R(M, r)` where `R` is the expected
//! best-action loss when the adversary plays uniformly random basis vectors for
//! the remaining `r` rounds. `R` is computed exactly by a memoized recursion
//! keyed on the sorted offsets `M_i - min_j M_j`, which is sound because `R` is
//! shift-equivariant and permutation-invariant.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::special::{binomial_exact, half_binomial_pmf, ln_binomial};
use crate::types::{ActionDistribution, CumulativeLossVector};

/// Default cap on memo entries per table.
pub const DEFAULT_STATE_BUDGET: usize = 10_000_000;

/// `c_N = sqrt(2 (N - 1) ln N) / N`, the constant in `V(0, T) <= c_N sqrt(T)`.
pub fn c_n(n: usize) -> f64 {
    let nf = n as f64;
    (2.0 * (nf - 1.0) * nf.ln()).sqrt() / nf
}

/// Memo key: sorted offsets from the minimum (as raw `f64` bits) plus the
/// number of remaining rounds.
///
/// Offsets at or above `r` are capped to `r`, since such an action can never
/// fall strictly below the current leader within `r` rounds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValueKey {
    offsets: Vec<u64>,
    rounds: u32,
}

impl ValueKey {
    /// Normalizes `m` and returns the key together with the removed shift `min_j M_j`.
    pub fn new(m: &[f64], rounds: u32) -> (Self, f64) {
        let shift = m.iter().copied().fold(f64::INFINITY, f64::min);
        let cap = rounds as f64;
        let mut offsets: Vec<f64> = m.iter().map(|&x| (x - shift).min(cap)).collect();
        offsets.sort_by(f64::total_cmp);
        let key = ValueKey {
            offsets: offsets.iter().map(|x| x.to_bits()).collect(),
            rounds,
        };
        (key, shift)
    }

    pub fn offsets(&self) -> Vec<f64> {
        self.offsets.iter().map(|&b| f64::from_bits(b)).collect()
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }
}

/// Exact `R` / `V` evaluator for a fixed action count.
///
/// The memo table sits behind a mutex that is never held across recursive
/// calls, so one table can be shared by concurrent callers.
#[derive(Debug)]
pub struct RandomWalkTable {
    n: usize,
    budget: usize,
    memo: Mutex<HashMap<ValueKey, f64>>,
}

impl RandomWalkTable {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_budget(n, DEFAULT_STATE_BUDGET)
    }

    pub fn with_budget(n: usize, budget: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("need at least two actions"));
        }
        Ok(RandomWalkTable {
            n,
            budget,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> usize {
        self.memo.lock().expect("memo lock").len()
    }

    fn check(&self, m: &[f64]) -> Result<()> {
        if m.len() != self.n {
            return Err(Error::domain(format!(
                "loss vector has {} entries, table built for {}",
                m.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// `R(M, r)`: expected best-action loss under `r` rounds of uniform random
    /// basis-vector play starting from `M`.
    pub fn random_walk_r(&self, m: &CumulativeLossVector, r: u32) -> Result<f64> {
        self.check(m.losses())?;
        self.r_raw(m.losses(), r)
    }

    fn r_raw(&self, m: &[f64], r: u32) -> Result<f64> {
        let (key, shift) = ValueKey::new(m, r);
        Ok(shift + self.r_normalized(key)?)
    }

    fn r_normalized(&self, key: ValueKey) -> Result<f64> {
        if key.rounds == 0 {
            return Ok(0.0);
        }
        if let Some(&v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(v);
        }
        let offsets = key.offsets();
        let mut total = 0.0;
        let mut i = 0;
        // equal offsets give identical children; weight each distinct value by its multiplicity
        while i < offsets.len() {
            let mut j = i;
            while j < offsets.len() && offsets[j].to_bits() == offsets[i].to_bits() {
                j += 1;
            }
            let mut child = offsets.clone();
            child[i] += 1.0;
            total += (j - i) as f64 * self.r_raw(&child, key.rounds - 1)?;
            i = j;
        }
        let value = total / self.n as f64;
        let mut memo = self.memo.lock().expect("memo lock");
        if memo.len() >= self.budget {
            return Err(Error::Budget {
                what: "random-walk memo",
                limit: self.budget,
            });
        }
        memo.insert(key, value);
        Ok(value)
    }

    /// `V(M, r) = r/N - R(M, r)`.
    pub fn minimax_v(&self, m: &CumulativeLossVector, r: u32) -> Result<f64> {
        Ok(r as f64 / self.n as f64 - self.random_walk_r(m, r)?)
    }

    /// Optimal weights with `r >= 1` rounds left: `P_i = V(M, r) - V(M + e_i, r - 1)`.
    pub fn minimax_weights(&self, m: &CumulativeLossVector, r: u32) -> Result<ActionDistribution> {
        if r == 0 {
            return Err(Error::domain(
                "minimax weights need at least one remaining round",
            ));
        }
        let v = self.minimax_v(m, r)?;
        let mut w = Vec::with_capacity(self.n);
        for i in 0..self.n {
            w.push(v - self.minimax_v(&m.plus_basis(i), r - 1)?);
        }
        ActionDistribution::new(w)
    }
}

/// `S(T) = V(0, T)` for two actions, `T / 2^T * C(T - 1, floor(T / 2))`.
///
/// Exact integer arithmetic up to `T = 64`, log-gamma beyond.
pub fn two_action_game_value(t: u64) -> f64 {
    if t == 0 {
        return 0.0;
    }
    if t <= 64 {
        let c = binomial_exact(t - 1, t / 2).expect("fits in u128 for t <= 64");
        let num = (t as u128) * c;
        return num as f64 / 2f64.powi(t as i32);
    }
    ((t as f64).ln() + ln_binomial(t - 1, t / 2) - t as f64 * std::f64::consts::LN_2).exp()
}

/// Weight on the leading action (the one with the smaller loss) for `N = 2`
/// with an integer loss gap `gap` and `rounds >= 1` rounds left.
///
/// Equals `1/2 + Pr[-gap <= S_n < gap] / 2` for a simple random walk `S_n`
/// with `n = rounds - 1` steps.
pub fn two_action_leader_weight(gap: u64, rounds: u64) -> f64 {
    0.5 + 0.5 * strip_probability(gap, rounds - 1)
}

/// `Pr[-gap <= S_n < gap]` for a simple symmetric random walk of `n` steps.
pub fn strip_probability(gap: u64, n: u64) -> f64 {
    if gap == 0 {
        return 0.0;
    }
    if gap > n {
        return 1.0;
    }
    // S_n = 2X - n with X ~ Bin(n, 1/2); need (n - gap)/2 <= X < (n + gap)/2
    let lo = (n - gap).div_ceil(2);
    let hi_excl = (n + gap).div_ceil(2);
    (lo..hi_excl.min(n + 1))
        .map(|x| half_binomial_pmf(n, x))
        .sum()
}

/// Exact `N = 2` minimax weights from the closed form; `None` when `M` has a
/// non-integer gap or `r == 0`.
pub fn two_action_weights(m: &CumulativeLossVector, r: u64) -> Option<ActionDistribution> {
    let l = m.losses();
    if l.len() != 2 || r == 0 {
        return None;
    }
    let diff = l[1] - l[0];
    if diff.fract() != 0.0 {
        return None;
    }
    let lead = two_action_leader_weight(diff.abs() as u64, r);
    let w = if diff >= 0.0 {
        vec![lead, 1.0 - lead]
    } else {
        vec![1.0 - lead, lead]
    };
    ActionDistribution::new(w).ok()
}

/// Monte Carlo estimate of `R(M, r)` with its standard error.
///
/// Each sample path draws `r` independent uniform basis vectors from one
/// `ChaCha8` stream seeded by `seed`.
pub fn estimate_r(
    m: &CumulativeLossVector,
    r: u32,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    if r == 0 {
        return Ok((m.min(), 0.0));
    }
    let n = m.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = vec![0.0; n];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        path.copy_from_slice(m.losses());
        for _ in 0..r {
            path[rng.gen_range(0..n)] += 1.0;
        }
        let best = path.iter().copied().fold(f64::INFINITY, f64::min);
        sum += best;
        sum_sq += best * best;
    }
    let k = samples as f64;
    let mean = sum / k;
    let stderr = if samples > 1 {
        let var = ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    Ok((mean, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cv(v: &[f64]) -> CumulativeLossVector {
        CumulativeLossVector::new(v.to_vec()).unwrap()
    }

    /// Average over all N^r adversary sequences of the final best-action loss.
    fn brute_force_r(m: &[f64], r: u32) -> f64 {
        let n = m.len();
        let total = n.pow(r);
        let mut acc = 0.0;
        for code in 0..total {
            let mut path = m.to_vec();
            let mut c = code;
            for _ in 0..r {
                path[c % n] += 1.0;
                c /= n;
            }
            acc += path.iter().copied().fold(f64::INFINITY, f64::min);
        }
        acc / total as f64
    }

    #[test]
    fn r_examples() {
        let t = RandomWalkTable::new(3).unwrap();
        assert_eq!(t.random_walk_r(&cv(&[2.0, 1.0, 3.0]), 0).unwrap(), 1.0);
        let t2 = RandomWalkTable::new(2).unwrap();
        assert_eq!(t2.random_walk_r(&cv(&[0.0, 0.0]), 1).unwrap(), 0.0);
        let r3 = t2.random_walk_r(&cv(&[0.0, 0.0]), 3).unwrap();
        assert!((r3 - 0.75).abs() < 1e-15);
        assert!((brute_force_r(&[0.0, 0.0], 3) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn r_matches_enumeration() {
        for (m, r) in [
            (vec![0.0, 0.0, 0.0], 5),
            (vec![1.0, 0.0, 4.0], 4),
            (vec![0.5, 2.0, 0.0, 1.0], 4),
            (vec![3.0, 0.0], 7),
        ] {
            let t = RandomWalkTable::new(m.len()).unwrap();
            let exact = t.random_walk_r(&cv(&m), r).unwrap();
            assert!((exact - brute_force_r(&m, r)).abs() < 1e-12, "{m:?} r={r}");
        }
    }

    #[test]
    fn v_examples() {
        let t = RandomWalkTable::new(2).unwrap();
        assert_eq!(t.minimax_v(&cv(&[0.0, 0.0]), 0).unwrap(), 0.0);
        assert!((t.minimax_v(&cv(&[0.0, 0.0]), 3).unwrap() - 0.75).abs() < 1e-15);
        assert!((t.minimax_v(&cv(&[0.0, 0.0]), 4).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(two_action_game_value(1), 0.5);
        assert_eq!(two_action_game_value(2), 0.5);
        assert_eq!(two_action_game_value(4), 0.75);
        let t = RandomWalkTable::new(2).unwrap();
        for big_t in 1..=16u32 {
            let v = t.minimax_v(&cv(&[0.0, 0.0]), big_t).unwrap();
            assert!((v - two_action_game_value(big_t as u64)).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_form_is_continuous_across_exact_cutoff() {
        // log-gamma branch at 65 against the exact ratio S(65)/S(63) = 65/(63 * 2) * C(64,32)/(2 C(62,31))
        let s63 = two_action_game_value(63);
        let s65 = two_action_game_value(65);
        let ratio = 65.0 / 63.0 / 4.0 * (64.0 * 63.0) / (32.0 * 32.0);
        assert!((s65 / s63 - ratio).abs() < 1e-10);
        // large T follows sqrt(2T/pi)/2
        let t = 10_000u64;
        let approx = (2.0 * t as f64 / std::f64::consts::PI).sqrt() / 2.0;
        assert!((two_action_game_value(t) / approx - 1.0).abs() < 1e-3);
    }

    #[test]
    fn weight_examples() {
        let t2 = RandomWalkTable::new(2).unwrap();
        let w = t2.minimax_weights(&cv(&[0.0, 0.0]), 1).unwrap();
        assert_eq!(w.weights(), &[0.5, 0.5]);
        let w = t2.minimax_weights(&cv(&[5.0, 5.0]), 2).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-15);
        let t3 = RandomWalkTable::new(3).unwrap();
        let w = t3.minimax_weights(&cv(&[1.0, 1.0, 2.0]), 1).unwrap();
        // one round left: every action leaves the minimum unchanged or ties it, so P is uniform
        assert_eq!(w[0], w[1]);
        assert!((w[2] - 1.0 / 3.0).abs() < 1e-15);
        let w = t3.minimax_weights(&cv(&[1.0, 1.0, 2.0]), 3).unwrap();
        assert_eq!(w[0], w[1]);
        assert!(t3.minimax_weights(&cv(&[0.0, 0.0, 0.0]), 0).is_err());
    }

    #[test]
    fn two_action_closed_form_matches_recursion() {
        let t = RandomWalkTable::new(2).unwrap();
        for gap in 0..6 {
            for r in 1..12u32 {
                let m = cv(&[2.0, 2.0 + gap as f64]);
                let rec = t.minimax_weights(&m, r).unwrap();
                let closed = two_action_weights(&m, r as u64).unwrap();
                assert!(rec.max_abs_diff(&closed) < 1e-12, "gap={gap} r={r}");
                let flipped = two_action_weights(&cv(&[2.0 + gap as f64, 2.0]), r as u64).unwrap();
                assert!((flipped[1] - closed[0]).abs() < 1e-15);
            }
        }
        assert!(two_action_weights(&cv(&[0.5, 0.0]), 3).is_none());
    }

    #[test]
    fn c_n_values() {
        assert!((c_n(2) - 0.588_705_011_257_737_3).abs() < 1e-12);
        assert!((c_n(3) - 0.698_764_715_978_803_3).abs() < 1e-12);
        assert!((c_n(4) - 0.721_013_443_300_441_5).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_estimates() {
        assert_eq!(estimate_r(&cv(&[0.0, 0.0]), 0, 10, 1).unwrap(), (0.0, 0.0));
        let (est, se) = estimate_r(&cv(&[0.0, 0.0]), 3, 100_000, 7).unwrap();
        assert!((est - 0.75).abs() <= 3.0 * se, "{est} ± {se}");
        let exact = RandomWalkTable::new(3)
            .unwrap()
            .random_walk_r(&cv(&[0.0; 3]), 2)
            .unwrap();
        let (est, se) = estimate_r(&cv(&[0.0; 3]), 2, 100_000, 11).unwrap();
        assert!((est - exact).abs() <= 3.0 * se);
        assert_eq!(
            estimate_r(&cv(&[0.0; 3]), 2, 1000, 5).unwrap(),
            estimate_r(&cv(&[0.0; 3]), 2, 1000, 5).unwrap()
        );
    }

    #[test]
    fn budget_is_reported() {
        let t = RandomWalkTable::with_budget(4, 10).unwrap();
        let err = t.random_walk_r(&cv(&[0.0; 4]), 8).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn shared_table_across_threads() {
        let t = std::sync::Arc::new(RandomWalkTable::new(3).unwrap());
        let handles: Vec<_> = (0..4)
            .map(|k| {
                let t = t.clone();
                std::thread::spawn(move || t.minimax_v(&cv(&[k as f64, 0.0, 1.0]), 9).unwrap())
            })
            .collect();
        let got: Vec<f64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let fresh = RandomWalkTable::new(3).unwrap();
        for (k, v) in got.into_iter().enumerate() {
            assert_eq!(v, fresh.minimax_v(&cv(&[k as f64, 0.0, 1.0]), 9).unwrap());
        }
    }

    #[test]
    fn value_upper_bound_small() {
        for n in 2..=5usize {
            let t = RandomWalkTable::new(n).unwrap();
            for big_t in 1..=20u32 {
                let v = t.minimax_v(&CumulativeLossVector::zeros(n), big_t).unwrap();
                assert!(v <= c_n(n) * (big_t as f64).sqrt() + 1e-12);
            }
        }
    }

    fn small_state() -> impl Strategy<Value = (Vec<f64>, u32)> {
        (2usize..=4)
            .prop_flat_map(|n| (prop::collection::vec(0u8..=10, n), 0u32..=6))
            .prop_map(|(m, r)| (m.into_iter().map(f64::from).collect(), r))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn shift_invariance((m, r) in small_state(), a in -2i32..=5) {
            let t = RandomWalkTable::new(m.len()).unwrap();
            let shifted: Vec<f64> = m.iter().map(|x| x - a as f64).collect();
            let v = t.minimax_v(&cv(&m), r).unwrap();
            let vs = t.minimax_v(&cv(&shifted), r).unwrap();
            prop_assert!((v - (vs - a as f64)).abs() < 1e-12);
        }

        #[test]
        fn monotone_in_losses((m, r) in small_state(), i in 0usize..4) {
            let t = RandomWalkTable::new(m.len()).unwrap();
            let i = i % m.len();
            let base = cv(&m);
            let bumped = base.plus_basis(i);
            prop_assert!(t.minimax_v(&bumped, r).unwrap() <= t.minimax_v(&base, r).unwrap() + 1e-12);
            prop_assert!(t.random_walk_r(&bumped, r).unwrap() >= t.random_walk_r(&base, r).unwrap() - 1e-12);
        }

        #[test]
        fn difference_bound_and_r_monotonicity((m, r) in small_state()) {
            let t = RandomWalkTable::new(m.len()).unwrap();
            let n = m.len() as f64;
            let m = cv(&m);
            let r = r.max(1);
            prop_assert!(t.random_walk_r(&m, r).unwrap() - t.random_walk_r(&m, r - 1).unwrap() <= 1.0 / n + 1e-12);
            prop_assert!(t.minimax_v(&m, r - 1).unwrap() <= t.minimax_v(&m, r).unwrap() + 1e-12);
        }

        #[test]
        fn weights_are_distributions((m, r) in small_state()) {
            let t = RandomWalkTable::new(m.len()).unwrap();
            let w = t.minimax_weights(&cv(&m), r.max(1)).unwrap();
            prop_assert!(w.weights().iter().all(|&p| p >= 0.0));
            prop_assert!((w.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn separation_lemma(
            n in 2usize..=4,
            first in prop::collection::vec(0usize..4, 0..=4),
            second in prop::collection::vec(0usize..4, 0..=4),
            r in 0u32..=4,
        ) {
            let sum = |idx: &[usize]| {
                let mut v = vec![0.0; n];
                idx.iter().for_each(|&i| v[i % n] += 1.0);
                cv(&v)
            };
            let m1 = sum(&first);
            let m2 = sum(&second);
            let both: Vec<usize> = first.iter().chain(&second).copied().collect();
            let t = RandomWalkTable::new(n).unwrap();
            let lhs = t.minimax_v(&sum(&both), r).unwrap() - t.minimax_v(&m1, 0).unwrap();
            prop_assert!(lhs <= t.minimax_v(&m2, r).unwrap() + 1e-12);
        }
    }
}
