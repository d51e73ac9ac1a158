//! Exponential weights over general losses in `[0,1]^N`: fixed, time-varying
//! and pretend-prior learning rates, and the first-order variant whose rate
//! follows the best action's loss.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{check_loss, Decision, Learner, Setting};
use crate::error::{Error, Result};
use crate::numeric::quad::{integrate, QuadConfig};
use crate::priors::{Growth, HorizonPrior};
use crate::types::{ActionDistribution, CumulativeLossVector};

/// Default rate constant: `eta = sqrt(8 ln N / T)`.
pub const DEFAULT_B: f64 = 8.0;
/// Relative tolerance of the first-order quadrature.
pub const FIRST_ORDER_REL_TOL: f64 = 1e-8;

/// `P_i ∝ exp(-eta M_i)`, shifted by the largest exponent before exponentiating.
pub fn softmax_weights(m: &[f64], eta: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    softmax_into(m, eta, &mut out);
    out
}

fn softmax_into(m: &[f64], eta: f64, out: &mut Vec<f64>) {
    let top = m.iter().map(|x| -eta * x).fold(f64::NEG_INFINITY, f64::max);
    out.clear();
    out.extend(m.iter().map(|x| (-eta * x - top).exp()));
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|w| *w /= sum);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ExpWeightsMode {
    /// `eta = sqrt(b ln N / T)` for a known horizon.
    Fixed { horizon: u64 },
    /// `eta_t = sqrt(b ln N / t)`.
    TimeVarying,
    /// `E[P^T | T >= t]` with `eta_T = sqrt(b ln N / T)` and `Pr[T] ∝ T^{-d}`.
    Pretend { d: f64 },
}

#[derive(Debug, Clone)]
pub struct ExpWeights {
    mode: ExpWeightsMode,
    b: f64,
    prior: Option<HorizonPrior>,
    m: CumulativeLossVector,
    round: u64,
}

impl ExpWeights {
    pub fn new(n: usize, mode: ExpWeightsMode, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(
                "exponential weights need at least two actions",
            ));
        }
        if !(b > 0.0) {
            return Err(Error::domain(format!(
                "rate constant b must be positive, got {b}"
            )));
        }
        let prior = match mode {
            ExpWeightsMode::Pretend { d } => {
                if !(d > 1.5) {
                    return Err(Error::domain(format!(
                        "pretend exponent must exceed 3/2, got {d}"
                    )));
                }
                Some(HorizonPrior::discrete(d)?)
            }
            ExpWeightsMode::Fixed { horizon: 0 } => {
                return Err(Error::domain("horizon must be positive"));
            }
            _ => None,
        };
        Ok(ExpWeights {
            mode,
            b,
            prior,
            m: CumulativeLossVector::zeros(n),
            round: 1,
        })
    }

    pub fn fixed(n: usize, horizon: u64) -> Result<Self> {
        Self::new(n, ExpWeightsMode::Fixed { horizon }, DEFAULT_B)
    }

    pub fn time_varying(n: usize) -> Result<Self> {
        Self::new(n, ExpWeightsMode::TimeVarying, DEFAULT_B)
    }

    pub fn pretend(n: usize, d: f64, b: f64) -> Result<Self> {
        Self::new(n, ExpWeightsMode::Pretend { d }, b)
    }

    pub fn mode(&self) -> ExpWeightsMode {
        self.mode
    }

    fn eta(&self, horizon: f64) -> f64 {
        (self.b * (self.m.n() as f64).ln() / horizon).sqrt()
    }

    /// Weights at round `t` with cumulative losses `m`.
    pub fn weights_at(&self, m: &CumulativeLossVector, t: u64) -> Result<ActionDistribution> {
        let losses = m.losses();
        let w = match (&self.mode, &self.prior) {
            (ExpWeightsMode::Fixed { horizon }, _) => {
                if t > *horizon {
                    return Err(Error::HorizonExceeded {
                        horizon: *horizon as usize,
                    });
                }
                softmax_weights(losses, self.eta(*horizon as f64))
            }
            (ExpWeightsMode::TimeVarying, _) => softmax_weights(losses, self.eta(t as f64)),
            (ExpWeightsMode::Pretend { .. }, Some(prior)) => {
                let mut scratch = Vec::with_capacity(losses.len());
                prior.conditional_expectation_vec(
                    t as f64,
                    losses.len(),
                    Growth::BOUNDED,
                    |big_t, out| {
                        softmax_into(losses, self.eta(big_t), &mut scratch);
                        out.copy_from_slice(&scratch);
                    },
                )?
            }
            (ExpWeightsMode::Pretend { .. }, None) => {
                unreachable!("pretend mode always carries its prior")
            }
        };
        ActionDistribution::normalized(w)
    }

    pub fn weights(&self) -> Result<ActionDistribution> {
        self.weights_at(&self.m, self.round)
    }

    pub fn set_state(&mut self, t: u64, m: CumulativeLossVector) -> Result<()> {
        check_loss(self.m.n(), m.losses())?;
        self.round = t.max(1);
        self.m = m;
        Ok(())
    }
}

fn fmt_f(x: f64) -> String {
    format!("{}", x)
}

impl Learner for ExpWeights {
    fn setting(&self) -> Setting {
        Setting::Hedge
    }

    fn n(&self) -> usize {
        self.m.n()
    }

    fn name(&self) -> String {
        match self.mode {
            ExpWeightsMode::Fixed { horizon } => {
                format!("exp_weights:mode=fixed,T={horizon},b={}", fmt_f(self.b))
            }
            ExpWeightsMode::TimeVarying => {
                format!("exp_weights:mode=time_varying,b={}", fmt_f(self.b))
            }
            ExpWeightsMode::Pretend { d } => format!(
                "exp_weights:mode=pretend,d={},b={}",
                fmt_f(d),
                fmt_f(self.b)
            ),
        }
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

/// First-order exponential weights: `E[P^m | m >= m_{t-1}]` with
/// `P^m ∝ exp(-sqrt(ln N / m) M)`, `m_{t-1} = min_i M_i + 1` and
/// `Pr[m] ∝ m^{-d}` on a continuum.
///
/// With `u = m_{t-1} / m` each weight is
/// `(d-1) ∫_0^1 u^{d-2} P_i(sqrt(u ln N / m_{t-1})) du`.
#[derive(Debug, Clone)]
pub struct FirstOrder {
    d: f64,
    m: CumulativeLossVector,
    mass_error: f64,
}

impl FirstOrder {
    pub fn new(n: usize, d: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(
                "first-order weights need at least two actions",
            ));
        }
        if !(d > 1.5) {
            return Err(Error::domain(format!(
                "prior exponent must exceed 3/2, got {d}"
            )));
        }
        Ok(FirstOrder {
            d,
            m: CumulativeLossVector::zeros(n),
            mass_error: 0.0,
        })
    }

    /// `d = 5/2 + sqrt(2)`.
    pub fn default_d() -> f64 {
        2.5 + std::f64::consts::SQRT_2
    }

    /// Integrated weights before renormalization.
    pub fn raw_weights(&self, m: &CumulativeLossVector) -> Result<Vec<f64>> {
        let d = self.d;
        let losses = m.losses();
        let scale = (losses.len() as f64).ln() / (m.min() + 1.0);
        let cfg = QuadConfig::with_rel_tol(FIRST_ORDER_REL_TOL);
        let mut scratch = Vec::with_capacity(losses.len());
        (0..losses.len())
            .map(|i| {
                let r = integrate(
                    |u| {
                        softmax_into(losses, (u * scale).sqrt(), &mut scratch);
                        (d - 1.0) * u.powf(d - 2.0) * scratch[i]
                    },
                    0.0,
                    1.0,
                    cfg,
                )?;
                Ok(r.value)
            })
            .collect()
    }

    pub fn weights_at(&mut self, m: &CumulativeLossVector) -> Result<ActionDistribution> {
        let raw = self.raw_weights(m)?;
        self.mass_error = raw.iter().sum::<f64>() - 1.0;
        ActionDistribution::normalized(raw)
    }

    /// Deviation of the last integrated weights' total from one.
    pub fn mass_error(&self) -> f64 {
        self.mass_error
    }

    pub fn set_state(&mut self, m: CumulativeLossVector) -> Result<()> {
        check_loss(self.m.n(), m.losses())?;
        self.m = m;
        Ok(())
    }
}

impl Learner for FirstOrder {
    fn setting(&self) -> Setting {
        Setting::Hedge
    }

    fn n(&self) -> usize {
        self.m.n()
    }

    fn name(&self) -> String {
        format!("first_order:d={}", fmt_f(self.d))
    }

    fn decide(&mut self, _rng: &mut dyn RngCore) -> Result<Decision> {
        let m = self.m.clone();
        Ok(Decision::Distribution(self.weights_at(&m)?))
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
