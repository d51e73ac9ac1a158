//! Minimax-based Hedge learners over the basis-vector loss space.

use std::sync::Arc;

use rand::RngCore;

use super::{check_loss, sample_action, Decision, Learner, Setting};
use crate::error::{Error, Result};
use crate::hedge_values::{two_action_weights, RandomWalkTable};
use crate::numeric::quad::{integrate_to_infinity, QuadConfig};
use crate::numeric::special::ln_gamma;
use crate::priors::HorizonPrior;
use crate::types::{ActionDistribution, CumulativeLossVector};

/// Default bound on the weight perturbation from truncating a conditional sum.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-9;

/// Fixed-horizon minimax weights at `M` with `r` rounds left.
fn fixed_weights(
    table: &RandomWalkTable,
    m: &CumulativeLossVector,
    r: u64,
) -> Result<ActionDistribution> {
    if let Some(w) = two_action_weights(m, r) {
        return Ok(w);
    }
    let r = u32::try_from(r).map_err(|_| Error::domain("remaining rounds exceed u32"))?;
    table.minimax_weights(m, r)
}

/// The minimax learner for a known horizon `T`.
#[derive(Debug, Clone)]
pub struct FixedMinimaxHedge {
    horizon: u64,
    round: u64,
    m: CumulativeLossVector,
    table: Arc<RandomWalkTable>,
}

impl FixedMinimaxHedge {
    pub fn new(n: usize, horizon: u64) -> Result<Self> {
        Ok(Self::with_table(
            Arc::new(RandomWalkTable::new(n)?),
            horizon,
        ))
    }

    pub fn with_table(table: Arc<RandomWalkTable>, horizon: u64) -> Self {
        FixedMinimaxHedge {
            horizon,
            round: 1,
            m: CumulativeLossVector::zeros(table.n()),
            table,
        }
    }

    pub fn weights(&self) -> Result<ActionDistribution> {
        if self.round > self.horizon {
            return Err(Error::HorizonExceeded {
                horizon: self.horizon as usize,
            });
        }
        fixed_weights(&self.table, &self.m, self.horizon - self.round + 1)
    }
}

impl Learner for FixedMinimaxHedge {
    fn setting(&self) -> Setting {
        Setting::Hedge
    }

    fn n(&self) -> usize {
        self.m.n()
    }

    fn name(&self) -> String {
        format!("fixed_minimax:T={}", self.horizon)
    }

    fn decide(&mut self, _rng: &mut dyn RngCore) -> Result<Decision> {
        Ok(Decision::Distribution(self.weights()?))
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
}

/// Plays `E[P^T_t | T >= t]`, the fixed-horizon minimax weights averaged over
/// a horizon prior conditioned on the game having reached round `t`.
///
/// With a finitely supported prior this is the optimal random-horizon
/// learner; with a power-law prior it is the pretend-prior learner. For two
/// actions under a discrete power law the average is evaluated through a
/// one-dimensional integral; otherwise the conditional sum is truncated once
/// the remaining prior mass falls below the tolerance and the remainder is
/// filled with uniform weights.
#[derive(Debug, Clone)]
pub struct PriorAveragedHedge {
    prior: HorizonPrior,
    tolerance: f64,
    two_stage: bool,
    label: String,
    round: u64,
    m: CumulativeLossVector,
    table: Arc<RandomWalkTable>,
}

impl PriorAveragedHedge {
    pub fn new(n: usize, prior: HorizonPrior) -> Result<Self> {
        if let HorizonPrior::Continuous(_) = prior {
            return Err(Error::domain("Hedge horizon priors must be discrete"));
        }
        Ok(PriorAveragedHedge {
            label: "prior_hedge".into(),
            prior,
            tolerance: DEFAULT_TAIL_TOLERANCE,
            two_stage: false,
            round: 1,
            m: CumulativeLossVector::zeros(n),
            table: Arc::new(RandomWalkTable::new(n)?),
        })
    }

    /// Pretend-prior learner with `Pr[T = t] ∝ t^{-d}`.
    pub fn pretend(n: usize, d: f64) -> Result<Self> {
        Ok(Self::new(n, HorizonPrior::discrete(d)?)?.labeled(format!("pretend_hedge:d={d}")))
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_table(mut self, table: Arc<RandomWalkTable>) -> Self {
        self.table = table;
        self
    }

    /// Play single actions by first drawing `T | T >= t` and then `I ~ P^T_t`.
    pub fn two_stage(mut self) -> Self {
        self.two_stage = true;
        self
    }

    pub fn prior(&self) -> &HorizonPrior {
        &self.prior
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn state(&self) -> &CumulativeLossVector {
        &self.m
    }

    /// Jumps to round `t` with cumulative losses `m`.
    pub fn set_state(&mut self, t: u64, m: CumulativeLossVector) -> Result<()> {
        if m.n() != self.m.n() || t == 0 {
            return Err(Error::domain("state must match N and start at round 1"));
        }
        self.round = t;
        self.m = m;
        Ok(())
    }

    fn check_support(&self, t: u64) -> Result<()> {
        if let HorizonPrior::Finite(p) = &self.prior {
            if t > p.max_horizon() {
                return Err(Error::HorizonExceeded {
                    horizon: p.max_horizon() as usize,
                });
            }
        }
        Ok(())
    }

    /// Averaged weights at the current state.
    pub fn weights(&self) -> Result<ActionDistribution> {
        self.weights_at(&self.m, self.round)
    }

    pub fn weights_at(&self, m: &CumulativeLossVector, t: u64) -> Result<ActionDistribution> {
        self.check_support(t)?;
        let l = m.losses();
        if l.iter().all(|&x| x == l[0]) {
            // every P^T is symmetric here
            return Ok(ActionDistribution::uniform(l.len()));
        }
        if let (HorizonPrior::Discrete(p), 2) = (&self.prior, m.n()) {
            let l = m.losses();
            let gap = l[1] - l[0];
            if gap.fract() == 0.0 && p.start <= t {
                let lead = 0.5 + 0.5 * leader_deviation(p.d, t, gap.abs() as u64)?;
                let w = if gap >= 0.0 {
                    [lead, 1.0 - lead]
                } else {
                    [1.0 - lead, lead]
                };
                return ActionDistribution::new(w.to_vec());
            }
        }
        self.summed_weights(m, t, u64::MAX)
    }

    /// Direct conditional sum over `T = t, ..., max_horizon`, stopping early
    /// once the remaining mass is below the tolerance; leftover mass is
    /// assigned to uniform weights.
    pub fn summed_weights(
        &self,
        m: &CumulativeLossVector,
        t: u64,
        max_horizon: u64,
    ) -> Result<ActionDistribution> {
        self.check_support(t)?;
        let n = m.n();
        let tail = self.prior.tail_mass(t as f64);
        if tail <= 0.0 {
            return Err(Error::domain(format!(
                "round {t} lies beyond the prior's support"
            )));
        }
        let mut acc = vec![0.0; n];
        let mut covered = 0.0;
        let add = |big_t: u64, w: f64, acc: &mut Vec<f64>| -> Result<()> {
            let p = fixed_weights(&self.table, m, big_t - t + 1)?;
            acc.iter_mut()
                .zip(p.weights())
                .for_each(|(a, x)| *a += w * x);
            Ok(())
        };
        match &self.prior {
            HorizonPrior::Finite(p) => {
                for &(big_t, w) in p
                    .support()
                    .iter()
                    .filter(|&&(s, _)| s >= t && s <= max_horizon)
                {
                    add(big_t, w / tail, &mut acc)?;
                    covered += w / tail;
                }
            }
            _ => {
                let mut big_t = t.max(self.prior.start() as u64);
                while 1.0 - covered > self.tolerance && big_t <= max_horizon {
                    let w = self.prior.weight(big_t as f64) / tail;
                    add(big_t, w, &mut acc)?;
                    covered += w;
                    big_t += 1;
                }
            }
        }
        let rest = (1.0 - covered).max(0.0) / n as f64;
        acc.iter_mut().for_each(|a| *a += rest);
        ActionDistribution::normalized(acc)
    }

    /// Two-stage draw: `T | T >= t` from the prior, then `I ~ P^T_t`.
    pub fn draw_action<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        self.check_support(self.round)?;
        let big_t = self.prior.sample_horizon(self.round as f64, rng) as u64;
        let p = fixed_weights(&self.table, &self.m, big_t - self.round + 1)?;
        Ok(sample_action(&p, rng))
    }
}

impl Learner for PriorAveragedHedge {
    fn setting(&self) -> Setting {
        Setting::Hedge
    }

    fn n(&self) -> usize {
        self.m.n()
    }

    fn name(&self) -> String {
        self.label.clone()
    }

    fn decide(&mut self, mut rng: &mut dyn RngCore) -> Result<Decision> {
        if self.two_stage {
            return Ok(Decision::Action(self.draw_action(&mut rng)?));
        }
        Ok(Decision::Distribution(self.weights()?))
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
        self.two_stage
    }
}

/// `E[Pr[-gap <= S_{T-t} < gap] | T >= t]` under `Pr[T] ∝ T^{-d}`, where `S_n`
/// is a simple random walk; the leader's averaged weight is `(1 + this) / 2`.
///
/// With `T^{-d} = ∫ s^{d-1} e^{-Ts} ds / Γ(d)` the sum over `T` becomes the
/// walk's generating function
/// `H(z) = (1 + ρ)(1 - ρ^gap) / ((1 - ρ) sqrt(1 - z^2))`, `ρ = z / (1 + sqrt(1 - z^2))`,
/// evaluated at `z = e^{-s}`, leaving one integral over `s`.
pub fn leader_deviation(d: f64, t: u64, gap: u64) -> Result<f64> {
    if gap == 0 {
        return Ok(0.0);
    }
    let tf = t as f64;
    let g = gap as f64;
    // substitute s = σ / t
    let integrand = |sigma: f64| {
        if sigma <= 0.0 {
            return 0.0;
        }
        let s = sigma / tf;
        let w = (-(-2.0 * s).exp_m1()).sqrt();
        let ln_rho = -s - w.ln_1p();
        let rho = ln_rho.exp();
        let one_minus_rho = (w - (-s).exp_m1()) / (1.0 + w);
        let one_minus_rho_g = -(g * ln_rho).exp_m1();
        let h = (1.0 + rho) * one_minus_rho_g / (one_minus_rho * w);
        ((d - 1.0) * sigma.ln() - sigma).exp() * h
    };
    let cfg = QuadConfig {
        abs_tol: 1e-300,
        ..QuadConfig::with_rel_tol(1e-11)
    };
    let r = integrate_to_infinity(integrand, 0.0, cfg)?;
    let tail = crate::priors::DiscretePowerLaw::new(d)?.tail_sum(t);
    let value = (r.value.ln() - d * tf.ln() - ln_gamma(d) - tail.ln()).exp();
    Ok(value.clamp(0.0, 1.0))
}

/// Minimax weights for one remaining round, i.e. acting as if every round
/// were the last.
#[derive(Debug, Clone)]
pub struct LastRoundHedge {
    m: CumulativeLossVector,
    table: Arc<RandomWalkTable>,
}

impl LastRoundHedge {
    pub fn new(n: usize) -> Result<Self> {
        Ok(LastRoundHedge {
            m: CumulativeLossVector::zeros(n),
            table: Arc::new(RandomWalkTable::new(n)?),
        })
    }

    pub fn weights(&self) -> Result<ActionDistribution> {
        fixed_weights(&self.table, &self.m, 1)
    }
}

impl Learner for LastRoundHedge {
    fn setting(&self) -> Setting {
        Setting::Hedge
    }

    fn n(&self) -> usize {
        self.m.n()
    }

    fn name(&self) -> String {
        "last_round_hedge".into()
    }

    fn decide(&mut self, _rng: &mut dyn RngCore) -> Result<Decision> {
        Ok(Decision::Distribution(self.weights()?))
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        check_loss(self.m.n(), loss)?;
        self.m.add(loss);
        Ok(())
    }

    fn boxed_clone(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hedge_values::two_action_leader_weight;
    use crate::priors::FinitePrior;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cv(v: &[f64]) -> CumulativeLossVector {
        CumulativeLossVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn fixed_minimax_basics() {
        let mut l = FixedMinimaxHedge::new(2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            l.decide(&mut rng).unwrap(),
            Decision::Distribution(ActionDistribution::uniform(2))
        );
        l.observe(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            l.decide(&mut rng),
            Err(Error::HorizonExceeded { horizon: 1 })
        ));
    }

    #[test]
    fn point_mass_prior_is_fixed_minimax() {
        let prior = HorizonPrior::Finite(FinitePrior::point(5).unwrap());
        let mut a = PriorAveragedHedge::new(3, prior).unwrap();
        let mut b = FixedMinimaxHedge::new(3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for z in [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
        ] {
            match (a.decide(&mut rng).unwrap(), b.decide(&mut rng).unwrap()) {
                (Decision::Distribution(p), Decision::Distribution(q)) => {
                    assert!(p.max_abs_diff(&q) < 1e-12)
                }
                other => panic!("{other:?}"),
            }
            a.observe(&z).unwrap();
            b.observe(&z).unwrap();
        }
        assert!(a.decide(&mut rng).is_err());
    }

    #[test]
    fn symmetric_states_give_uniform_weights() {
        for n in [2usize, 3] {
            let prior = HorizonPrior::Finite(FinitePrior::uniform(1, 6).unwrap());
            let l = PriorAveragedHedge::new(n, prior).unwrap();
            let w = l.weights().unwrap();
            assert!(w.max_abs_diff(&ActionDistribution::uniform(n)) < 1e-15);
        }
        let p = PriorAveragedHedge::pretend(2, 2.35).unwrap();
        assert_eq!(p.weights().unwrap().weights(), &[0.5, 0.5]);
    }

    /// Leader weight from a direct sum over `T <= 10^5`; the rest of the
    /// prior uses the strip probability's leading term `gap sqrt(2 / (π n))`.
    fn direct_leader_weight(d: f64, t: u64, gap: u64) -> f64 {
        let cut = 100_000u64;
        let head: f64 = (t..=cut)
            .map(|big_t| (big_t as f64).powf(-d) * two_action_leader_weight(gap, big_t - t + 1))
            .sum();
        let x = cut as f64 + 0.5;
        let tf = t as f64;
        let tail_mass = x.powf(1.0 - d) / (d - 1.0);
        let strip = gap as f64
            * (2.0 / std::f64::consts::PI).sqrt()
            * (x.powf(0.5 - d) / (d - 0.5) + 0.5 * tf * x.powf(-0.5 - d) / (d + 0.5));
        let prior = crate::priors::DiscretePowerLaw::new(d).unwrap();
        (head + 0.5 * tail_mass + 0.5 * strip) / prior.tail_sum(t)
    }

    #[test]
    fn integral_route_matches_direct_summation() {
        let l = PriorAveragedHedge::pretend(2, 2.35).unwrap();
        for (t, m) in [
            (1u64, [0.0, 1.0]),
            (2, [1.0, 0.0]),
            (4, [0.0, 3.0]),
            (9, [2.0, 7.0]),
            (30, [18.0, 12.0]),
        ] {
            let fast = l.weights_at(&cv(&m), t).unwrap();
            let lead = direct_leader_weight(2.35, t, (m[1] - m[0]).abs() as u64);
            let leader = if m[1] >= m[0] { 0 } else { 1 };
            assert!(
                (fast[leader] - lead).abs() < 1e-8,
                "t={t}: {} vs {lead}",
                fast[leader]
            );
        }
    }

    #[test]
    fn two_stage_marginal_matches_weights() {
        let mut l = PriorAveragedHedge::pretend(2, 2.35).unwrap();
        l.set_state(5, cv(&[3.0, 1.0])).unwrap();
        let w = l.weights().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|_| l.draw_action(&mut rng).unwrap() == 1)
            .count();
        let sigma = (w[1] * (1.0 - w[1]) / draws as f64).sqrt();
        assert!((hits as f64 / draws as f64 - w[1]).abs() < 3.0 * sigma);
    }

    #[test]
    fn last_round_weights() {
        let mut l = LastRoundHedge::new(2).unwrap();
        assert_eq!(l.weights().unwrap().weights(), &[0.5, 0.5]);
        l.observe(&[1.0, 0.0]).unwrap();
        assert_eq!(l.weights().unwrap().weights(), &[0.0, 1.0]);
        l.observe(&[0.0, 1.0]).unwrap();
        assert_eq!(l.weights().unwrap().weights(), &[0.5, 0.5]);
    }
}
