//! Follow the perturbed leader with a pretend continuous power-law horizon.
//!
//! Each round draws `T | T >= t` with density `∝ T^{-d}`, then
//! `ξ ~ U[0, Δ_T]^N` with `Δ_T = sqrt(b T N)`, and plays `argmin_i (M_i + ξ_i)`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_loss, Decision, Learner, Setting};
use crate::error::{Error, Result};
use crate::priors::{fpl_default_b, ContinuousPowerLaw, HorizonPrior};
use crate::types::CumulativeLossVector;

/// One perturbation draw and the pretend horizon behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSample {
    pub xi: Vec<f64>,
    pub horizon: f64,
}

#[derive(Debug, Clone)]
pub struct FplPretend {
    d: f64,
    b: f64,
    prior: HorizonPrior,
    m: CumulativeLossVector,
    round: u64,
}

impl FplPretend {
    pub fn new(n: usize, d: f64, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("FPL needs at least two actions"));
        }
        if !(d > 1.5) || !(b > 0.0) {
            return Err(Error::domain(format!(
                "FPL parameters out of range: d={d}, b={b}"
            )));
        }
        Ok(FplPretend {
            d,
            b,
            prior: HorizonPrior::Continuous(ContinuousPowerLaw::new(d)?),
            m: CumulativeLossVector::zeros(n),
            round: 1,
        })
    }

    /// `d = 1 + sqrt(3)/2`, `b = (d - 3/2)/((d - 1/2)(d - 1))`.
    pub fn with_defaults(n: usize) -> Result<Self> {
        let d = 1.0 + 3f64.sqrt() / 2.0;
        Self::new(n, d, fpl_default_b(d))
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn state(&self) -> &CumulativeLossVector {
        &self.m
    }

    pub fn set_state(&mut self, t: u64, m: CumulativeLossVector) -> Result<()> {
        check_loss(self.m.n(), m.losses())?;
        self.round = t.max(1);
        self.m = m;
        Ok(())
    }

    pub fn delta(&self, horizon: f64) -> f64 {
        (self.b * horizon * self.m.n() as f64).sqrt()
    }

    /// Two-stage draw of `ξ_t` at the current round.
    pub fn sample_perturbation<R: Rng + ?Sized>(&self, rng: &mut R) -> PerturbationSample {
        let horizon = self.prior.sample_horizon(self.round as f64, rng);
        let delta = self.delta(horizon);
        let xi = (0..self.m.n()).map(|_| delta * rng.gen::<f64>()).collect();
        PerturbationSample { xi, horizon }
    }

    /// `argmin_i (M_i + ξ_i)`, lowest index on ties.
    pub fn choose(m: &[f64], xi: &[f64]) -> usize {
        let mut best = 0;
        let mut best_v = f64::INFINITY;
        for (i, (a, b)) in m.iter().zip(xi).enumerate() {
            let v = a + b;
            if v < best_v {
                best = i;
                best_v = v;
            }
        }
        best
    }

    pub fn density(&self, xi: &[f64]) -> f64 {
        fpl_density(xi, self.round as f64, self.d, self.b)
    }
}

impl Learner for FplPretend {
    fn setting(&self) -> Setting {
        Setting::Hedge
    }

    fn n(&self) -> usize {
        self.m.n()
    }

    fn name(&self) -> String {
        format!("fpl:d={},b={}", self.d, self.b)
    }

    fn decide(&mut self, mut rng: &mut dyn RngCore) -> Result<Decision> {
        let s = self.sample_perturbation(&mut rng);
        Ok(Decision::Action(Self::choose(self.m.losses(), &s.xi)))
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        check_loss(self.m.n(), loss)?;
        self.m.add(loss);
        self.round += 1;
        Ok(())
    }

    fn boxed_clone(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }

    fn is_randomized(&self) -> bool {
        true
    }
}

/// Density of `ξ_t` at round `t`:
/// `c Δ_t^{-N} min(1, (Δ_t / ||ξ||_∞)^{2d-2+N})` on the orthant, `0` off it,
/// with `c = (d-1)/(d-1+N/2)`.
pub fn fpl_density(xi: &[f64], t: f64, d: f64, b: f64) -> f64 {
    if xi.iter().any(|&x| x < 0.0) {
        return 0.0;
    }
    let n = xi.len() as f64;
    let delta = (b * t * n).sqrt();
    let c = (d - 1.0) / (d - 1.0 + n / 2.0);
    let sup = xi.iter().copied().fold(0.0, f64::max);
    let base = c * delta.powf(-n);
    if sup <= delta {
        base
    } else {
        base * (delta / sup).powf(2.0 * d - 2.0 + n)
    }
}

/// CDF of `ρ = ||ξ||_∞ / Δ_t` under [`fpl_density`].
pub fn fpl_radial_cdf(rho: f64, n: usize, d: f64) -> f64 {
    let nf = n as f64;
    let c = (d - 1.0) / (d - 1.0 + nf / 2.0);
    if rho <= 0.0 {
        0.0
    } else if rho <= 1.0 {
        c * rho.powf(nf)
    } else {
        c + c * nf * (1.0 - rho.powf(2.0 - 2.0 * d)) / (2.0 * d - 2.0)
    }
}

/// Importance-sampling estimate of `∫ fpl_density` over the orthant, with its
/// standard error.
///
/// The proposal draws `s = ||ξ||_∞` from an even mix of `N s^{N-1} / Δ^N` on
/// `[0, Δ]` and a Pareto tail of index `2d - 5/2` beyond `Δ`, then places `ξ`
/// uniformly on the orthant face set `{||ξ||_∞ = s}`.
pub fn fpl_normalization_estimate(
    n: usize,
    t: f64,
    d: f64,
    b: f64,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = n as f64;
    let delta = (b * t * nf).sqrt();
    let a = 2.0 * d - 2.5;
    let mut xi = vec![0.0; n];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let u: f64 = rng.gen();
        let s = if rng.gen::<bool>() {
            delta * u.powf(1.0 / nf)
        } else {
            delta * (1.0 - u).powf(-1.0 / a)
        };
        let face = rng.gen_range(0..n);
        for (j, x) in xi.iter_mut().enumerate() {
            *x = if j == face { s } else { s * rng.gen::<f64>() };
        }
        let h = if s <= delta {
            0.5 * nf * s.powf(nf - 1.0) / delta.powf(nf)
        } else {
            0.5 * a * delta.powf(a) * s.powf(-a - 1.0)
        };
        let q = h / (nf * s.powf(nf - 1.0));
        let w = fpl_density(&xi, t, d, b) / q;
        sum += w;
        sum_sq += w * w;
    }
    let k = samples as f64;
    let mean = sum / k;
    let var = (sum_sq / k - mean * mean).max(0.0);
    (mean, (var / k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_regions() {
        let (d, b, t) = (1.0 + 3f64.sqrt() / 2.0, 0.3, 5.0);
        assert_eq!(fpl_density(&[1.0, -0.1, 0.0], t, d, b), 0.0);
        let delta = (b * t * 3.0).sqrt();
        let c = (d - 1.0) / (d - 1.0 + 1.5);
        let inside = fpl_density(&[0.1, delta, 0.3], t, d, b);
        assert!((inside - c / delta.powi(3)).abs() < 1e-15);
        let outside = fpl_density(&[0.1, 2.0 * delta, 0.3], t, d, b);
        assert!((outside / inside - 2f64.powf(-(2.0 * d + 1.0))).abs() < 1e-14);
    }

    #[test]
    fn radial_cdf_limits() {
        for (n, d) in [(2, 1.9), (4, 3.0), (10, 1.6)] {
            assert!((fpl_radial_cdf(1e12, n, d) - 1.0).abs() < 1e-6);
            let c = (d - 1.0) / (d - 1.0 + n as f64 / 2.0);
            assert!((fpl_radial_cdf(1.0, n, d) - c).abs() < 1e-15);
        }
    }

    #[test]
    fn normalization_close_to_one() {
        let d = 1.0 + 3f64.sqrt() / 2.0;
        let (mean, se) = fpl_normalization_estimate(3, 4.0, d, fpl_default_b(d), 200_000, 11);
        assert!((mean - 1.0).abs() < 4.0 * se.max(1e-4), "{mean} ± {se}");
    }

    #[test]
    fn sampler_matches_radial_law() {
        let mut l = FplPretend::with_defaults(4).unwrap();
        l.set_state(3, CumulativeLossVector::zeros(4)).unwrap();
        let delta = l.delta(3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = 40_000;
        let below = (0..k)
            .filter(|_| {
                let s = l.sample_perturbation(&mut rng);
                s.xi.iter().copied().fold(0.0, f64::max) <= delta
            })
            .count() as f64
            / k as f64;
        let p = fpl_radial_cdf(1.0, 4, l.d());
        assert!((below - p).abs() < 4.0 * (p * (1.0 - p) / k as f64).sqrt());
    }

    #[test]
    fn argmin_shift_invariant() {
        let xi = [0.3, 1.1, 0.05];
        let m = [2.0, 1.0, 2.2];
        let shifted: Vec<f64> = m.iter().map(|x| x + 17.5).collect();
        assert_eq!(
            FplPretend::choose(&m, &xi),
            FplPretend::choose(&shifted, &xi)
        );
        assert_eq!(FplPretend::choose(&m, &xi), 1);
    }
}
