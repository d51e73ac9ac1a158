//! Learners for the online linear game over the unit ball: each round the
//! learner picks `x` with `||x|| <= 1`, the adversary reveals `w` with
//! `||w|| <= 1`, and the learner pays `w . x`.

use rand::RngCore;

use super::{check_loss, Decision, Learner, Setting};
use crate::error::{Error, Result};
use crate::types::l2_norm;

/// Band `|1 - t/c| <= SERIES_BAND` where the coefficient uses its power series.
const SERIES_BAND: f64 = 0.5;
/// Enough terms for the series to converge to rounding at the band edge.
const SERIES_TERMS: usize = 60;

/// Running sum `W` of adversary points plus the round counter.
#[derive(Debug, Clone)]
struct BallState {
    w: Vec<f64>,
    round: u64,
}

impl BallState {
    fn new(n: usize) -> Self {
        BallState {
            w: vec![0.0; n],
            round: 1,
        }
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        check_loss(self.w.len(), loss)?;
        if l2_norm(loss) > 1.0 + 1e-12 {
            return Err(Error::domain(
                "ball adversary point lies outside the unit ball",
            ));
        }
        self.w.iter_mut().zip(loss).for_each(|(a, b)| *a += b);
        self.round += 1;
        Ok(())
    }

    fn norm_sq(&self) -> f64 {
        self.w.iter().map(|x| x * x).sum()
    }

    fn scaled(&self, coef: f64) -> Vec<f64> {
        self.w.iter().map(|x| coef * x).collect()
    }
}

/// `x_t = -W / sqrt(||W||^2 + r)` with `r` rounds left including this one.
fn minimax_point(state: &BallState, remaining: f64) -> Vec<f64> {
    let den = (state.norm_sq() + remaining).sqrt();
    state.scaled(-1.0 / den)
}

/// The minimax learner for a known horizon `T`.
#[derive(Debug, Clone)]
pub struct BallMinimax {
    horizon: u64,
    state: BallState,
}

impl BallMinimax {
    pub fn new(n: usize, horizon: u64) -> Self {
        BallMinimax {
            horizon,
            state: BallState::new(n),
        }
    }
}

impl Learner for BallMinimax {
    fn setting(&self) -> Setting {
        Setting::Ball
    }

    fn n(&self) -> usize {
        self.state.w.len()
    }

    fn name(&self) -> String {
        format!("ball_minimax:T={}", self.horizon)
    }

    fn decide(&mut self, _rng: &mut dyn RngCore) -> Result<Decision> {
        if self.state.round > self.horizon {
            return Err(Error::HorizonExceeded {
                horizon: self.horizon as usize,
            });
        }
        let remaining = (self.horizon - self.state.round + 1) as f64;
        Ok(Decision::Point(minimax_point(&self.state, remaining)))
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        self.state.observe(loss)
    }

    fn boxed_clone(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

/// Treats every round as the last: the minimax rule with `T` replaced by `t`.
#[derive(Debug, Clone)]
pub struct LastRoundBall {
    state: BallState,
}

impl LastRoundBall {
    pub fn new(n: usize) -> Self {
        LastRoundBall {
            state: BallState::new(n),
        }
    }
}

impl Learner for LastRoundBall {
    fn setting(&self) -> Setting {
        Setting::Ball
    }

    fn n(&self) -> usize {
        self.state.w.len()
    }

    fn name(&self) -> String {
        "last_round_ball".into()
    }

    fn decide(&mut self, _rng: &mut dyn RngCore) -> Result<Decision> {
        Ok(Decision::Point(minimax_point(&self.state, 1.0)))
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        self.state.observe(loss)
    }

    fn boxed_clone(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

/// Coefficient `k(c, t)` of the adaptive rule `x_t = k W_{t-1}`, with
/// `c = 1 + ||W_{t-1}||^2`.
///
/// It equals `-E[(c + T - t)^{-1/2} | T >= t]` for a horizon density
/// `∝ T^{-2}`. With `y = 1 - t/c` and `x = sqrt(|y|)`:
/// `((1 - y) artanh(x) - x) / (x^3 sqrt(c))` for `y > 0`,
/// `(x - (1 + x^2) arctan(x)) / (x^3 sqrt(c))` for `y < 0`,
/// and the power series `-(2 / sqrt(c)) Σ_{k>=1} y^{k-1} / (4k^2 - 1)` for
/// `|y| <= 1/2`, where the closed forms lose digits to cancellation.
pub fn ball_adaptive_coefficient(c: f64, t: f64) -> f64 {
    let y = (c - t) / c;
    let x = y.abs().sqrt();
    if y.abs() <= SERIES_BAND {
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 1..=SERIES_TERMS {
            let kf = k as f64;
            sum += pow / (4.0 * kf * kf - 1.0);
            pow *= y;
        }
        -2.0 * sum / c.sqrt()
    } else if y > 0.0 {
        ((1.0 - y) * x.atanh() - x) / (x * x * x * c.sqrt())
    } else {
        (x - (1.0 + x * x) * x.atan()) / (x * x * x * c.sqrt())
    }
}

/// Anytime learner averaging the minimax points over a horizon density `∝ T^{-2}`.
#[derive(Debug, Clone)]
pub struct BallAdaptive {
    state: BallState,
}

impl BallAdaptive {
    pub fn new(n: usize) -> Self {
        BallAdaptive {
            state: BallState::new(n),
        }
    }

    pub fn point(&self) -> Vec<f64> {
        let c = 1.0 + self.state.norm_sq();
        self.state
            .scaled(ball_adaptive_coefficient(c, self.state.round as f64))
    }
}

impl Learner for BallAdaptive {
    fn setting(&self) -> Setting {
        Setting::Ball
    }

    fn n(&self) -> usize {
        self.state.w.len()
    }

    fn name(&self) -> String {
        "ball_adaptive".into()
    }

    fn decide(&mut self, _rng: &mut dyn RngCore) -> Result<Decision> {
        Ok(Decision::Point(self.point()))
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        self.state.observe(loss)
    }

    fn boxed_clone(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

/// Projected online gradient descent with step `eta_t = scale / sqrt(t)`:
/// `x_t = Π(x_{t-1} - eta_t w_{t-1})`, starting at the origin.
#[derive(Debug, Clone)]
pub struct OgdBall {
    x: Vec<f64>,
    last: Option<Vec<f64>>,
    scale: f64,
    round: u64,
}

impl OgdBall {
    pub fn new(n: usize) -> Self {
        Self::with_scale(n, 2.0)
    }

    pub fn with_scale(n: usize, scale: f64) -> Self {
        OgdBall {
            x: vec![0.0; n],
            last: None,
            scale,
            round: 1,
        }
    }
}

/// Euclidean projection onto the unit ball.
pub fn project_to_ball(x: &mut [f64]) {
    let norm = l2_norm(x);
    if norm > 1.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

impl Learner for OgdBall {
    fn setting(&self) -> Setting {
        Setting::Ball
    }

    fn n(&self) -> usize {
        self.x.len()
    }

    fn name(&self) -> String {
        "ogd".into()
    }

    fn decide(&mut self, _rng: &mut dyn RngCore) -> Result<Decision> {
        if let Some(w) = self.last.take() {
            let eta = self.scale / (self.round as f64).sqrt();
            self.x.iter_mut().zip(&w).for_each(|(x, g)| *x -= eta * g);
            project_to_ball(&mut self.x);
        }
        Ok(Decision::Point(self.x.clone()))
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        check_loss(self.x.len(), loss)?;
        self.last = Some(loss.to_vec());
        self.round += 1;
        Ok(())
    }

    fn boxed_clone(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}
