//! Lower bound on the scaled regret of any learner facing an adversary who
//! also picks the horizon, for two actions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hedge_values::two_action_game_value;

fn check_t0(t0: u64) -> Result<()> {
    if t0 < 4 || t0 % 2 != 0 {
        return Err(Error::domain(format!(
            "truncation horizon must be even and at least 4, got {t0}"
        )));
    }
    Ok(())
}

/// `(sum_{k=1}^{T0/2-1} S(2k) / 2^k)^{-1}`, the partial-sum form whose limit
/// as `T0 -> ∞` is `1 / F(1/8) = sqrt(2)`.
pub fn scaled_lower_bound(t0: u64) -> Result<f64> {
    check_t0(t0)?;
    let sum: f64 = (1..t0 / 2)
        .map(|k| two_action_game_value(2 * k) / 2f64.powi(k as i32))
        .sum();
    Ok(1.0 / sum)
}

/// Finite-`T0` closed form of `G^{T0}_2(1/2)`:
/// `(2^{(T0-2)/2} - 1/2) / (S(T0) + sum_{k=1}^{(T0-2)/2} 2^{k-1} S(T0 - 2k))`.
pub fn scaled_lower_bound_closed_form(t0: u64) -> Result<f64> {
    check_t0(t0)?;
    let half = (t0 - 2) / 2;
    let den = two_action_game_value(t0)
        + (1..=half)
            .map(|k| 2f64.powi(k as i32 - 1) * two_action_game_value(t0 - 2 * k))
            .sum::<f64>();
    Ok((2f64.powi(half as i32) - 0.5) / den)
}

/// The restricted-adversary recursion
/// `G_{T0}(L) = L / S(T0)`,
/// `G_t(L) = min_p max{(L + p) / S(t), G_{t+2}(L + 1/2 - p)}` for even `t`.
///
/// Every `G_t` is affine, `G_t(L) = alpha_t L + beta_t`; equalizing the two
/// branches gives `alpha_t = 2 alpha / (1 + alpha S(t))` and
/// `beta_t = (alpha / 2 + beta) / (1 + alpha S(t))`.
#[derive(Debug, Clone, Serialize)]
pub struct ScaledRegretTable {
    t0: u64,
    /// `(t, alpha_t, beta_t)` for `t = T0, T0 - 2, ..., 2`.
    rows: Vec<(u64, f64, f64)>,
}

impl ScaledRegretTable {
    pub fn new(t0: u64) -> Result<Self> {
        check_t0(t0)?;
        let mut alpha = 1.0 / two_action_game_value(t0);
        let mut beta = 0.0;
        let mut rows = vec![(t0, alpha, beta)];
        let mut t = t0;
        while t > 2 {
            t -= 2;
            let s = two_action_game_value(t);
            let den = 1.0 + alpha * s;
            let next = (2.0 * alpha / den, (alpha / 2.0 + beta) / den);
            alpha = next.0;
            beta = next.1;
            rows.push((t, alpha, beta));
        }
        Ok(ScaledRegretTable { t0, rows })
    }

    pub fn t0(&self) -> u64 {
        self.t0
    }

    /// `G_t(L)` for even `2 <= t <= T0`.
    pub fn g(&self, t: u64, l: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|&&(s, _, _)| s == t)
            .map(|&(_, a, b)| a * l + b)
    }

    /// `G_2(1/2)`.
    pub fn bound(&self) -> f64 {
        self.g(2, 0.5).expect("row t = 2 always present")
    }
}

/// `(G(x), F(x)) = ((1 - 4x)^{-1/2}, 2x (1 - 4x)^{-3/2})`.
pub fn generating_function_check(x: f64) -> Result<(f64, f64)> {
    if !(0.0..0.25).contains(&x) {
        return Err(Error::domain(format!(
            "generating functions need 0 <= x < 1/4, got {x}"
        )));
    }
    let base = 1.0 - 4.0 * x;
    Ok((base.powf(-0.5), 2.0 * x * base.powf(-1.5)))
}

/// `(sum_{j<terms} C(2j,j) x^j, sum_{j<terms} j C(2j,j) x^j)`.
pub fn generating_function_partial_sums(x: f64, terms: usize) -> (f64, f64) {
    let mut g = 0.0;
    let mut f = 0.0;
    // c_j = C(2j, j) x^j, with c_{j+1} / c_j = 2(2j+1)/(j+1) x
    let mut c = 1.0;
    for j in 0..terms {
        g += c;
        f += j as f64 * c;
        c *= 2.0 * (2 * j + 1) as f64 / (j + 1) as f64 * x;
    }
    (g, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_sum_examples() {
        assert_eq!(scaled_lower_bound(4).unwrap(), 4.0);
        assert!((scaled_lower_bound(60).unwrap() - 2f64.sqrt()).abs() < 1e-6);
        assert!(scaled_lower_bound(5).is_err() && scaled_lower_bound(2).is_err());
    }

    #[test]
    fn partial_sum_decreases_to_limit() {
        let vals: Vec<f64> = [8, 16, 32, 60, 120]
            .iter()
            .map(|&t| scaled_lower_bound(t).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[0] > w[1]));
        assert!(vals.iter().all(|&v| v >= 2f64.sqrt()));
        // extending the series far past 60 moves the value by less than 1e-6
        assert!((vals[3] - scaled_lower_bound(400).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn recursion_matches_finite_closed_form() {
        for t0 in (4..=16).step_by(2) {
            let table = ScaledRegretTable::new(t0).unwrap();
            assert!((table.g(t0, 3.0).unwrap() - 3.0 / two_action_game_value(t0)).abs() < 1e-12);
            let closed = scaled_lower_bound_closed_form(t0).unwrap();
            assert!((table.bound() - closed).abs() < 1e-12, "t0={t0}");
        }
        assert!((ScaledRegretTable::new(4).unwrap().bound() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn recursion_by_direct_minimax() {
        // brute-force min over p on a fine grid around the equalizer
        let t0 = 8;
        let table = ScaledRegretTable::new(t0).unwrap();
        for t in [2u64, 4, 6] {
            for l in [0.0, 0.5, 2.0] {
                let s = two_action_game_value(t);
                let next = |x: f64| table.g(t + 2, x).unwrap();
                let best = (0..=200_000)
                    .map(|i| -5.0 + 10.0 * i as f64 / 200_000.0)
                    .map(|p| ((l + p) / s).max(next(l + 0.5 - p)))
                    .fold(f64::INFINITY, f64::min);
                assert!((best - table.g(t, l).unwrap()).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn recursion_increases_toward_limit() {
        let vals: Vec<f64> = [4, 8, 16, 60, 400]
            .iter()
            .map(|&t| ScaledRegretTable::new(t).unwrap().bound())
            .collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        assert!(vals.iter().all(|&v| v < 2f64.sqrt()));
    }

    #[test]
    fn generating_functions() {
        assert_eq!(generating_function_check(0.0).unwrap(), (1.0, 0.0));
        let (_, f) = generating_function_check(0.125).unwrap();
        assert!((f - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((1.0 / f - 2f64.sqrt()).abs() < 1e-14);
        let (g, f) = generating_function_check(0.1).unwrap();
        let (gs, fs) = generating_function_partial_sums(0.1, 50);
        assert!((g - gs).abs() < 1e-9 && (f - fs).abs() < 1e-9);
        assert!(generating_function_check(0.25).is_err());
    }
}
