//! Shared domain types: probability vectors over actions and cumulative loss vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries this far below zero are treated as rounding noise and clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of the total mass from one.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A probability vector over `N` actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDistribution(Vec<f64>);

impl ActionDistribution {
    /// Validates `weights`: entries at or above `-1e-12` (tiny negatives clamp to
    /// zero) and a total within `1e-9` of one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("empty distribution"));
        }
        let mut weights = weights;
        for w in weights.iter_mut() {
            if !w.is_finite() || *w < -CLAMP_TOLERANCE {
                return Err(Error::Numerical(format!("invalid weight {w}")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Numerical(format!("weights sum to {sum}")));
        }
        Ok(ActionDistribution(weights))
    }

    /// Clamps negatives and rescales to unit mass. Fails only on a zero or
    /// non-finite total.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        for w in weights.iter_mut() {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::Numerical(format!("cannot normalize mass {sum}")));
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        Ok(ActionDistribution(weights))
    }

    pub fn uniform(n: usize) -> Self {
        ActionDistribution(vec![1.0 / n as f64; n])
    }

    pub fn point(n: usize, i: usize) -> Self {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        ActionDistribution(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Expected loss `P . Z`.
    pub fn dot(&self, loss: &[f64]) -> f64 {
        self.0.iter().zip(loss).map(|(p, z)| p * z).sum()
    }

    pub fn max_abs_diff(&self, other: &ActionDistribution) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Inverse-CDF draw from a uniform `u` in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, w) in self.0.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding gap above the final partial sum
        self.0.iter().rposition(|&w| w > 0.0).unwrap_or(0)
    }
}

impl std::ops::Index<usize> for ActionDistribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Per-action accumulated loss `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeLossVector(Vec<f64>);

impl CumulativeLossVector {
    pub fn new(losses: Vec<f64>) -> Result<Self> {
        if losses.len() < 2 {
            return Err(Error::domain("need at least two actions"));
        }
        if losses.iter().any(|m| !m.is_finite()) {
            return Err(Error::domain("non-finite cumulative loss"));
        }
        Ok(CumulativeLossVector(losses))
    }

    pub fn zeros(n: usize) -> Self {
        CumulativeLossVector(vec![0.0; n])
    }

    pub fn losses(&self) -> &[f64] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn add(&mut self, loss: &[f64]) {
        for (m, z) in self.0.iter_mut().zip(loss) {
            *m += z;
        }
    }

    pub fn plus(&self, loss: &[f64]) -> Self {
        let mut out = self.clone();
        out.add(loss);
        out
    }

    pub fn plus_basis(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.0[i] += 1.0;
        out
    }

    /// Regret of learner loss `l` against the best action.
    pub fn regret(&self, l: f64) -> f64 {
        l - self.min()
    }
}

impl From<&[f64]> for CumulativeLossVector {
    fn from(v: &[f64]) -> Self {
        CumulativeLossVector(v.to_vec())
    }
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_tiny_negatives() {
        let d = ActionDistribution::new(vec![-1e-13, 1.0]).unwrap();
        assert_eq!(d.weights(), &[0.0, 1.0]);
        assert!(ActionDistribution::new(vec![-1e-6, 1.0]).is_err());
        assert!(ActionDistribution::new(vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn inverse_cdf_sampling() {
        let d = ActionDistribution::new(vec![0.25, 0.0, 0.75]).unwrap();
        assert_eq!(d.sample_with(0.0), 0);
        assert_eq!(d.sample_with(0.2499), 0);
        assert_eq!(d.sample_with(0.25), 2);
        assert_eq!(d.sample_with(0.999_999_999), 2);
        let point = ActionDistribution::point(4, 0);
        assert!((0..100).all(|k| point.sample_with(k as f64 / 100.0) == 0));
    }

    #[test]
    fn regret_against_best_action() {
        let m = CumulativeLossVector::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(m.regret(2.5), 1.5);
    }
}
