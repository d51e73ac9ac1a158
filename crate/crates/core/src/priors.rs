//! Horizon priors: discrete and continuous power laws, plus finite and
//! geometric fixtures, with tail masses, stopping probabilities, conditional
//! expectations and conditional sampling.
//!
//! Power-law weights are left unnormalized (`w(T) = T^{-d}`); every
//! conditional quantity divides by the matching tail mass, so the normalizing
//! constant never has to be known.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hedge_values::c_n;
use crate::numeric::quad::{integrate, QuadConfig};
use crate::numeric::special::ln_gamma;

/// Number of explicit terms summed before a discrete tail is replaced by an integral.
const DISCRETE_TERMS: u64 = 4096;
/// Cut point for the Euler-Maclaurin evaluation of `sum_{T >= t} T^{-d}`.
const EM_CUTOFF: u64 = 64;

/// `Pr[T = t] ∝ t^{-d}` on `{start, start + 1, ...}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscretePowerLaw {
    pub d: f64,
    pub start: u64,
}

/// Density `∝ T^{-d}` on `[start, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousPowerLaw {
    pub d: f64,
    pub start: f64,
}

/// Finitely supported prior, stored as ascending `(horizon, probability)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePrior {
    support: Vec<(u64, f64)>,
}

/// `Pr[T = t] = p (1 - p)^{t - start}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricPrior {
    pub p: f64,
    pub start: u64,
}

impl DiscretePowerLaw {
    pub fn new(d: f64) -> Result<Self> {
        Self::with_start(d, 1)
    }

    pub fn with_start(d: f64, start: u64) -> Result<Self> {
        if !(d > 1.5) || !d.is_finite() {
            return Err(Error::domain(format!(
                "power-law exponent must exceed 3/2, got {d}"
            )));
        }
        if start == 0 {
            return Err(Error::domain("support must start at 1 or later"));
        }
        Ok(DiscretePowerLaw { d, start })
    }

    /// `S_t = sum_{T >= t} T^{-d}` by direct summation plus an Euler-Maclaurin tail.
    pub fn tail_sum(&self, t: u64) -> f64 {
        let t = t.max(self.start);
        let k = t.max(EM_CUTOFF);
        let head: f64 = (t..k).map(|x| (x as f64).powf(-self.d)).sum();
        head + euler_maclaurin_tail(self.d, k as f64)
    }
}

/// `sum_{T >= k} T^{-d}` through the Euler-Maclaurin formula with three
/// Bernoulli corrections; the next term is below `1e-17` for `k >= 64`.
fn euler_maclaurin_tail(d: f64, k: f64) -> f64 {
    let f = k.powf(-d);
    let integral = k * f / (d - 1.0);
    let d1 = d * f / k;
    let d3 = d * (d + 1.0) * (d + 2.0) * f / k.powi(3);
    let d5 = d * (d + 1.0) * (d + 2.0) * (d + 3.0) * (d + 4.0) * f / k.powi(5);
    integral + 0.5 * f + d1 / 12.0 - d3 / 720.0 + d5 / 30240.0
}

impl ContinuousPowerLaw {
    pub fn new(d: f64) -> Result<Self> {
        Self::with_start(d, 1.0)
    }

    pub fn with_start(d: f64, start: f64) -> Result<Self> {
        if !(d > 1.5) || !d.is_finite() {
            return Err(Error::domain(format!(
                "power-law exponent must exceed 3/2, got {d}"
            )));
        }
        if !(start >= 1.0) || !start.is_finite() {
            return Err(Error::domain("continuous prior must start at 1 or later"));
        }
        Ok(ContinuousPowerLaw { d, start })
    }

    /// `S_t = ∫_t^∞ T^{-d} dT = 1 / ((d - 1) t^{d-1})`.
    pub fn tail_integral(&self, t: f64) -> f64 {
        1.0 / ((self.d - 1.0) * t.powf(self.d - 1.0))
    }

    /// Inverse conditional CDF: `T = t (1 - u)^{-1/(d-1)}`.
    pub fn quantile(&self, t: f64, u: f64) -> f64 {
        t * (1.0 - u).powf(-1.0 / (self.d - 1.0))
    }
}

impl FinitePrior {
    /// Builds from `(horizon, weight)` pairs; weights are normalized and
    /// duplicate horizons merged.
    pub fn new(pairs: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(u64, f64)> = pairs.into_iter().collect();
        if pairs
            .iter()
            .any(|&(t, w)| t == 0 || !(w >= 0.0) || !w.is_finite())
        {
            return Err(Error::domain(
                "finite prior needs horizons >= 1 and nonnegative weights",
            ));
        }
        pairs.sort_by_key(|&(t, _)| t);
        let mut support: Vec<(u64, f64)> = Vec::with_capacity(pairs.len());
        for (t, w) in pairs {
            match support.last_mut() {
                Some(last) if last.0 == t => last.1 += w,
                _ => support.push((t, w)),
            }
        }
        support.retain(|&(_, w)| w > 0.0);
        let total: f64 = support.iter().map(|&(_, w)| w).sum();
        if support.is_empty() || total <= 0.0 {
            return Err(Error::domain("finite prior has no mass"));
        }
        support.iter_mut().for_each(|(_, w)| *w /= total);
        Ok(FinitePrior { support })
    }

    pub fn uniform(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 || hi < lo {
            return Err(Error::domain(format!("empty horizon range {lo}..={hi}")));
        }
        Self::new((lo..=hi).map(|t| (t, 1.0)))
    }

    pub fn point(t: u64) -> Result<Self> {
        Self::new([(t, 1.0)])
    }

    pub fn support(&self) -> &[(u64, f64)] {
        &self.support
    }

    pub fn max_horizon(&self) -> u64 {
        self.support.last().map(|&(t, _)| t).unwrap_or(0)
    }

    pub fn pmf(&self, t: u64) -> f64 {
        self.support
            .binary_search_by_key(&t, |&(s, _)| s)
            .map(|i| self.support[i].1)
            .unwrap_or(0.0)
    }

    pub fn tail(&self, t: u64) -> f64 {
        let i = self.support.partition_point(|&(s, _)| s < t);
        self.support[i..].iter().map(|&(_, w)| w).sum()
    }
}

impl GeometricPrior {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain(format!(
                "geometric parameter must lie in (0, 1], got {p}"
            )));
        }
        Ok(GeometricPrior { p, start: 1 })
    }
}

/// Caller-declared growth of an integrand: `|g(T)| <= C (1 + T^exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub exponent: f64,
}

impl Growth {
    pub const BOUNDED: Growth = Growth { exponent: 0.0 };

    pub fn polynomial(exponent: f64) -> Self {
        Growth { exponent }
    }
}

/// Any supported horizon prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HorizonPrior {
    Discrete(DiscretePowerLaw),
    Continuous(ContinuousPowerLaw),
    Finite(FinitePrior),
    Geometric(GeometricPrior),
}

impl HorizonPrior {
    pub fn discrete(d: f64) -> Result<Self> {
        Ok(HorizonPrior::Discrete(DiscretePowerLaw::new(d)?))
    }

    pub fn continuous(d: f64) -> Result<Self> {
        Ok(HorizonPrior::Continuous(ContinuousPowerLaw::new(d)?))
    }

    pub fn start(&self) -> f64 {
        match self {
            HorizonPrior::Discrete(p) => p.start as f64,
            HorizonPrior::Continuous(p) => p.start,
            HorizonPrior::Finite(p) => p.support[0].0 as f64,
            HorizonPrior::Geometric(p) => p.start as f64,
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self, HorizonPrior::Continuous(_))
    }

    /// Unnormalized point weight (or density) at `t`.
    pub fn weight(&self, t: f64) -> f64 {
        if t < self.start() {
            return 0.0;
        }
        match self {
            HorizonPrior::Discrete(p) => t.powf(-p.d),
            HorizonPrior::Continuous(p) => t.powf(-p.d),
            HorizonPrior::Finite(p) => p.pmf(t as u64),
            HorizonPrior::Geometric(p) => p.p * (1.0 - p.p).powf(t - p.start as f64),
        }
    }

    /// Mass at or beyond `t`, on the same scale as [`weight`](Self::weight).
    ///
    /// Power laws return the unnormalized `S_t`; the fixtures return
    /// probabilities.
    pub fn tail_mass(&self, t: f64) -> f64 {
        let t = t.max(self.start());
        match self {
            HorizonPrior::Discrete(p) => p.tail_sum(t.ceil() as u64),
            HorizonPrior::Continuous(p) => p.tail_integral(t),
            HorizonPrior::Finite(p) => p.tail(t.ceil() as u64),
            HorizonPrior::Geometric(p) => (1.0 - p.p).powf(t.ceil() - p.start as f64),
        }
    }

    /// Stopping probability `q_t = Pr[T = t | T >= t]` for discrete priors.
    pub fn stop_prob(&self, t: u64) -> Result<f64> {
        if !self.is_discrete() {
            return Err(Error::domain(
                "stopping probability is defined for discrete priors only",
            ));
        }
        let tail = self.tail_mass(t as f64);
        if tail <= 0.0 {
            return Err(Error::domain(format!(
                "round {t} lies beyond the prior's support"
            )));
        }
        Ok(self.weight(t as f64) / tail)
    }

    /// `Pr[T = t' | T >= t]` (a density for the continuous prior).
    pub fn conditional_weight(&self, t: f64, t_prime: f64) -> f64 {
        if t_prime < t {
            return 0.0;
        }
        self.weight(t_prime) / self.tail_mass(t)
    }

    /// `E[g(T) | T >= t]` for a scalar integrand.
    pub fn conditional_expectation<G: FnMut(f64) -> f64>(
        &self,
        t: f64,
        growth: Growth,
        mut g: G,
    ) -> Result<f64> {
        let v = self.conditional_expectation_vec(t, 1, growth, |x, out| out[0] = g(x))?;
        Ok(v[0])
    }

    /// `E[g(T) | T >= t]` for a vector-valued integrand writing `dim` entries.
    ///
    /// Discrete power laws sum the first 4096 terms exactly and replace the
    /// rest by the midpoint integral `∫_{K-1/2}^∞`. The continuous prior
    /// integrates `(d-1) ∫_0^1 u^{d-2} g(t/u) du` to relative tolerance `1e-10`.
    pub fn conditional_expectation_vec<G>(
        &self,
        t: f64,
        dim: usize,
        growth: Growth,
        mut g: G,
    ) -> Result<Vec<f64>>
    where
        G: FnMut(f64, &mut [f64]),
    {
        let t = t.max(self.start());
        let mut out = vec![0.0; dim];
        let mut buf = vec![0.0; dim];
        match self {
            HorizonPrior::Discrete(p) => {
                check_growth(p.d, growth)?;
                let t0 = t.ceil() as u64;
                let k = t0 + DISCRETE_TERMS;
                for x in t0..k {
                    let w = (x as f64).powf(-p.d);
                    g(x as f64, &mut buf);
                    out.iter_mut().zip(&buf).for_each(|(o, b)| *o += w * b);
                }
                let edge = k as f64 - 0.5;
                let tail = power_tail_integral(p.d, edge, dim, &mut g)?;
                let norm = p.tail_sum(t0);
                out.iter_mut()
                    .zip(&tail)
                    .for_each(|(o, r)| *o = (*o + r) / norm);
            }
            HorizonPrior::Continuous(p) => {
                check_growth(p.d, growth)?;
                let tail = power_tail_integral(p.d, t, dim, &mut g)?;
                let norm = p.tail_integral(t);
                out.iter_mut().zip(&tail).for_each(|(o, r)| *o = r / norm);
            }
            HorizonPrior::Finite(p) => {
                let i = p.support.partition_point(|&(s, _)| (s as f64) < t);
                let norm: f64 = p.support[i..].iter().map(|&(_, w)| w).sum();
                if norm <= 0.0 {
                    return Err(Error::domain(format!(
                        "round {t} lies beyond the prior's support"
                    )));
                }
                for &(x, w) in &p.support[i..] {
                    g(x as f64, &mut buf);
                    out.iter_mut().zip(&buf).for_each(|(o, b)| *o += w * b);
                }
                out.iter_mut().for_each(|o| *o /= norm);
            }
            HorizonPrior::Geometric(p) => {
                // terms beyond n carry mass (1-p)^n; stop once that times the envelope is negligible
                let q = 1.0 - p.p;
                let mut w = p.p;
                let mut x = t.ceil();
                loop {
                    g(x, &mut buf);
                    out.iter_mut().zip(&buf).for_each(|(o, b)| *o += w * b);
                    w *= q;
                    x += 1.0;
                    let envelope = 1.0 + x.powf(growth.exponent.max(0.0));
                    if w / p.p * envelope < 1e-16 || w == 0.0 {
                        break;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Draws `T` from the law of `T` given `T >= t`.
    pub fn sample_horizon<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        self.sample_horizon_with(t, u)
    }

    /// Inverse conditional CDF at `u ∈ [0, 1)`.
    pub fn sample_horizon_with(&self, t: f64, u: f64) -> f64 {
        let t = t.max(self.start());
        match self {
            HorizonPrior::Continuous(p) => p.quantile(t, u),
            HorizonPrior::Discrete(p) => {
                let t0 = t.ceil() as u64;
                let target = (1.0 - u) * p.tail_sum(t0);
                // smallest T with S_{T+1} <= target
                if p.tail_sum(t0 + 1) <= target {
                    return t0 as f64;
                }
                let mut lo = t0;
                let mut hi = t0.max(1) * 2;
                while p.tail_sum(hi + 1) > target {
                    lo = hi;
                    if hi >= 1 << 52 {
                        return hi as f64;
                    }
                    hi *= 2;
                }
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if p.tail_sum(mid + 1) <= target {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi as f64
            }
            HorizonPrior::Finite(p) => {
                let i = p.support.partition_point(|&(s, _)| (s as f64) < t);
                let rest = &p.support[i..];
                let norm: f64 = rest.iter().map(|&(_, w)| w).sum();
                let mut acc = 0.0;
                for &(x, w) in rest {
                    acc += w / norm;
                    if u < acc {
                        return x as f64;
                    }
                }
                rest.last().map(|&(x, _)| x as f64).unwrap_or(t)
            }
            HorizonPrior::Geometric(p) => {
                if p.p >= 1.0 {
                    return t.ceil();
                }
                t.ceil() + ((1.0 - u).ln() / (1.0 - p.p).ln()).floor()
            }
        }
    }
}

fn check_growth(d: f64, growth: Growth) -> Result<()> {
    if growth.exponent >= d - 1.0 {
        return Err(Error::Divergence(format!(
            "integrand growth T^{} is not integrable against T^-{d}",
            growth.exponent
        )));
    }
    Ok(())
}

/// `∫_a^∞ x^{-d} g(x) dx = a^{1-d} ∫_0^1 u^{d-2} g(a/u) du`, one quadrature per component.
fn power_tail_integral<G>(d: f64, a: f64, dim: usize, g: &mut G) -> Result<Vec<f64>>
where
    G: FnMut(f64, &mut [f64]),
{
    let scale = a.powf(1.0 - d);
    let cfg = QuadConfig {
        abs_tol: 1e-15,
        ..QuadConfig::with_rel_tol(1e-10)
    };
    let mut buf = vec![0.0; dim];
    let mut out = Vec::with_capacity(dim);
    for j in 0..dim {
        let r = integrate(
            |u| {
                g(a / u, &mut buf);
                u.powf(d - 2.0) * buf[j]
            },
            0.0,
            1.0,
            cfg,
        )?;
        out.push(scale * r.value);
    }
    Ok(out)
}

/// `Γ(d - 3/2) / Γ(d)`.
pub fn gamma_ratio(d: f64) -> f64 {
    (ln_gamma(d - 1.5) - ln_gamma(d)).exp()
}

/// Leading terms of the regret guarantees for the adaptive learners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "snake_case")]
pub enum BoundSpec {
    /// Pretend-prior Hedge over basis vectors: `Γ(d-3/2)/Γ(d) (d-1)^2 c_N sqrt(π T)`.
    PretendHedge { d: f64, n: usize },
    /// Adaptive ball learner: `π sqrt(T)`.
    BallAdaptive,
    /// Adaptive FPL: `((d-1)/(sqrt(b)(d-1/2)) + sqrt(b)(d-1)^2/(d-3/2)) 2 sqrt(T N)`.
    Fpl { d: f64, b: f64, n: usize },
    /// Pretend exponential weights: `(sqrt(b)(d-1)/(4(d-1/2)) + (d-1)/((d-3/2)sqrt(b))) sqrt(T ln N)`.
    ExpWeights { d: f64, b: f64, n: usize },
    /// First-order learner, evaluated at the best action's loss `m*`.
    FirstOrder { d: f64, n: usize },
}

impl BoundSpec {
    /// FPL with `b = (d-3/2)/((d-1/2)(d-1))` and `d = 1 + sqrt(3)/2`.
    pub fn fpl_default(n: usize) -> Self {
        let d = 1.0 + 3f64.sqrt() / 2.0;
        BoundSpec::Fpl {
            d,
            b: fpl_default_b(d),
            n,
        }
    }

    /// Exponential weights with `b = (4d-2)/(d-3/2)`.
    pub fn exp_weights_optimal(d: f64, n: usize) -> Self {
        BoundSpec::ExpWeights {
            d,
            b: exp_weights_optimal_b(d),
            n,
        }
    }

    /// Multiplier of `sqrt(T)`, `sqrt(T N)`, `sqrt(T ln N)` or `sqrt(m* ln N)`.
    pub fn coefficient(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            BoundSpec::PretendHedge { d, n } => {
                gamma_ratio(d) * (d - 1.0).powi(2) * c_n(n) * std::f64::consts::PI.sqrt()
            }
            BoundSpec::BallAdaptive => std::f64::consts::PI,
            BoundSpec::Fpl { d, b, .. } => {
                2.0 * ((d - 1.0) / (b.sqrt() * (d - 0.5))
                    + b.sqrt() * (d - 1.0).powi(2) / (d - 1.5))
            }
            BoundSpec::ExpWeights { d, b, .. } => {
                b.sqrt() * (d - 1.0) / (4.0 * (d - 0.5)) + (d - 1.0) / ((d - 1.5) * b.sqrt())
            }
            BoundSpec::FirstOrder { d, .. } => {
                3.0 * (d - 7.0 / 6.0) * (d - 1.0) / ((d - 1.5) * (d - 0.5))
            }
        })
    }

    fn validate(&self) -> Result<()> {
        let (d, b, n) = match *self {
            BoundSpec::BallAdaptive => return Ok(()),
            BoundSpec::PretendHedge { d, n } | BoundSpec::FirstOrder { d, n } => (d, 1.0, n),
            BoundSpec::Fpl { d, b, n } | BoundSpec::ExpWeights { d, b, n } => (d, b, n),
        };
        if !(d > 1.5) || !(b > 0.0) || n < 2 {
            return Err(Error::domain(format!(
                "bound parameters out of range: d={d}, b={b}, N={n}"
            )));
        }
        Ok(())
    }

    /// Value of the leading term at horizon `x` (or at `m* = x` for [`BoundSpec::FirstOrder`]).
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!(
                "bound argument must be nonnegative, got {x}"
            )));
        }
        let c = self.coefficient()?;
        Ok(match *self {
            BoundSpec::PretendHedge { .. } | BoundSpec::BallAdaptive => c * x.sqrt(),
            BoundSpec::Fpl { n, .. } => c * (x * n as f64).sqrt(),
            BoundSpec::ExpWeights { n, .. } => c * (x * (n as f64).ln()).sqrt(),
            BoundSpec::FirstOrder { d, n } => {
                let ln_n = (n as f64).ln();
                c * (x * ln_n).sqrt() + (1.0 + (d - 1.0) * (x + 1.0).ln()) * ln_n
            }
        })
    }
}

pub fn eval_bound(spec: &BoundSpec, x: f64) -> Result<f64> {
    spec.eval(x)
}

pub fn fpl_default_b(d: f64) -> f64 {
    (d - 1.5) / ((d - 0.5) * (d - 1.0))
}

pub fn exp_weights_optimal_b(d: f64) -> f64 {
    (4.0 * d - 2.0) / (d - 1.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ZETA2: f64 = 1.644_934_066_848_226_4;

    #[test]
    fn tail_mass_examples() {
        let c = HorizonPrior::continuous(2.0).unwrap();
        assert_eq!(c.tail_mass(1.0), 1.0);
        let c = HorizonPrior::continuous(2.35).unwrap();
        assert!((c.tail_mass(10.0) - 0.033_087_673_492_663_926).abs() < 1e-15);
        let q = crate::numeric::quad::integrate_to_infinity(
            |x| x.powf(-2.35),
            10.0,
            QuadConfig::default(),
        )
        .unwrap();
        assert!((c.tail_mass(10.0) - q.value).abs() < 1e-11);
        let d = HorizonPrior::discrete(2.0).unwrap();
        assert!((d.tail_mass(1.0) - ZETA2).abs() < 1e-13);
    }

    #[test]
    fn tail_mass_against_long_summation() {
        // explicit sum to 10^7 plus the integral bound on the remainder
        let p = DiscretePowerLaw::new(2.0).unwrap();
        let k = 10_000_000u64;
        let head: f64 = (1..k).rev().map(|x| (x as f64).powi(-2)).sum();
        let lo = head + 1.0 / k as f64;
        let hi = head + 1.0 / (k as f64 - 1.0);
        let s = p.tail_sum(1);
        assert!(s > lo - 1e-12 && s < hi + 1e-12);
        for &t in &[1u64, 2, 7, 63, 64, 65, 1000] {
            for &d in &[1.6, 2.35, 4.0] {
                let p = DiscretePowerLaw::new(d).unwrap();
                let direct: f64 = (t..t + 2_000_000)
                    .rev()
                    .map(|x| (x as f64).powf(-d))
                    .sum::<f64>()
                    + euler_maclaurin_tail(d, (t + 2_000_000) as f64);
                assert!(
                    (p.tail_sum(t) - direct).abs() <= 1e-12 * direct,
                    "d={d} t={t}"
                );
            }
        }
    }

    #[test]
    fn stop_prob_examples() {
        let d = HorizonPrior::discrete(2.0).unwrap();
        assert!((d.stop_prob(1).unwrap() - 0.607_927_101_854_026_6).abs() < 1e-13);
        for &dd in &[1.7, 2.35, 4.0] {
            let p = HorizonPrior::discrete(dd).unwrap();
            assert!((p.stop_prob(100_000).unwrap() * 100_000.0 - (dd - 1.0)).abs() < 1e-3);
            for t in 1..200u64 {
                assert!(p.stop_prob(t).unwrap() <= (dd - 1.0) / t as f64 + 1e-15);
            }
        }
        let point = HorizonPrior::Finite(FinitePrior::point(7).unwrap());
        assert_eq!(point.stop_prob(7).unwrap(), 1.0);
        assert!(HorizonPrior::continuous(2.0).unwrap().stop_prob(1).is_err());
    }

    #[test]
    fn conditional_expectation_examples() {
        let priors = [
            HorizonPrior::discrete(2.35).unwrap(),
            HorizonPrior::continuous(2.0).unwrap(),
            HorizonPrior::Finite(FinitePrior::uniform(1, 10).unwrap()),
            HorizonPrior::Geometric(GeometricPrior::new(0.1).unwrap()),
        ];
        for p in &priors {
            for t in [1.0, 3.0, 8.0] {
                let v = p
                    .conditional_expectation(t, Growth::BOUNDED, |_| 1.0)
                    .unwrap();
                assert!((v - 1.0).abs() < 1e-9, "{p:?} t={t}: {v}");
            }
        }
        let c = HorizonPrior::continuous(2.0).unwrap();
        let v = c
            .conditional_expectation(1.0, Growth::BOUNDED, |x| 1.0 / x.sqrt())
            .unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
        let d = HorizonPrior::discrete(2.35).unwrap();
        let v = d
            .conditional_expectation(3.0, Growth::polynomial(0.5), |x| (x - 3.0).sqrt())
            .unwrap();
        assert!((v - 1.462_013_911_934_979_5).abs() < 1e-9, "{v}");
    }

    #[test]
    fn conditional_expectation_against_brute_force() {
        // 10^6 explicit terms, remainder by Euler-Maclaurin on the smooth summand
        let d = 2.35;
        let p = HorizonPrior::discrete(d).unwrap();
        let k = 1_000_003u64;
        let head: f64 = (3..k)
            .rev()
            .map(|x| (x as f64).powf(-d) * ((x - 3) as f64).sqrt())
            .sum();
        let kf = k as f64;
        let f = kf.powf(-d) * (kf - 3.0).sqrt();
        let tail_int = crate::numeric::quad::integrate_to_infinity(
            |x| x.powf(-d) * (x - 3.0).sqrt(),
            kf,
            QuadConfig::with_rel_tol(1e-12),
        )
        .unwrap()
        .value;
        let brute = (head + tail_int + 0.5 * f) / p.tail_mass(3.0);
        let v = p
            .conditional_expectation(3.0, Growth::polynomial(0.5), |x| (x - 3.0).sqrt())
            .unwrap();
        assert!((v - brute).abs() < 1e-8, "{v} vs {brute}");
    }

    #[test]
    fn divergence_is_reported() {
        let p = HorizonPrior::discrete(2.0).unwrap();
        let e = p
            .conditional_expectation(1.0, Growth::polynomial(1.0), |x| x)
            .unwrap_err();
        assert!(matches!(e, Error::Divergence(_)));
        let c = HorizonPrior::continuous(2.5).unwrap();
        assert!(c
            .conditional_expectation(1.0, Growth::polynomial(1.5), |x| x)
            .is_err());
    }

    #[test]
    fn normalization_and_consistency_chain() {
        for &d in &[1.6, 2.0, 2.35, 3.5] {
            let p = HorizonPrior::discrete(d).unwrap();
            for t in [1u64, 2, 10, 57] {
                let q = p.stop_prob(t).unwrap();
                for tp in [t + 1, t + 3, t + 40] {
                    let lhs = p.conditional_weight(t as f64, tp as f64);
                    let rhs = (1.0 - q) * p.conditional_weight((t + 1) as f64, tp as f64);
                    assert!((lhs - rhs).abs() < 1e-14 * lhs.max(1e-300));
                }
            }
            let c = HorizonPrior::continuous(d).unwrap();
            let mass = crate::numeric::quad::integrate_to_infinity(
                |x| c.conditional_weight(5.0, x),
                5.0,
                QuadConfig::default(),
            )
            .unwrap()
            .value;
            assert!((mass - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_examples() {
        let c = HorizonPrior::continuous(2.0).unwrap();
        assert_eq!(c.sample_horizon_with(1.0, 0.0), 1.0);
        assert!((c.sample_horizon_with(1.0, 0.75) - 4.0).abs() < 1e-12);
        let d = HorizonPrior::discrete(2.0).unwrap();
        assert_eq!(d.sample_horizon_with(1.0, 0.0), 1.0);
        assert_eq!(d.sample_horizon_with(1.0, 0.6), 1.0);
        assert_eq!(d.sample_horizon_with(1.0, 0.61), 2.0);
        assert!(d.sample_horizon_with(5.0, 0.3) >= 5.0);
    }

    #[test]
    fn discrete_sampler_mass_at_start() {
        let d = HorizonPrior::discrete(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| d.sample_horizon(1.0, &mut rng) == 1.0)
            .count();
        let p = 6.0 / std::f64::consts::PI.powi(2);
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn sampler_kolmogorov_smirnov() {
        let n = 100_000;
        let crit = 1.628 / (n as f64).sqrt();
        let c = HorizonPrior::continuous(2.35).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut xs: Vec<f64> = (0..n).map(|_| c.sample_horizon(2.0, &mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let cdf = |x: f64| 1.0 - (2.0 / x).powf(1.35);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n as f64)
                    .abs()
                    .max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < crit, "continuous KS {ks}");

        // discrete: compare the empirical CDF at each atom against the analytic one
        let p = DiscretePowerLaw::new(2.35).unwrap();
        let d = HorizonPrior::Discrete(p);
        let mut ys: Vec<u64> = (0..n)
            .map(|_| d.sample_horizon(2.0, &mut rng) as u64)
            .collect();
        ys.sort_unstable();
        let s2 = p.tail_sum(2);
        let mut ks = 0.0f64;
        for x in 2..2000u64 {
            let emp = ys.partition_point(|&y| y <= x) as f64 / n as f64;
            let ana = 1.0 - p.tail_sum(x + 1) / s2;
            ks = ks.max((emp - ana).abs());
        }
        assert!(ks < crit, "discrete KS {ks}");
    }

    #[test]
    fn finite_and_geometric_fixtures() {
        let u = FinitePrior::uniform(1, 4).unwrap();
        assert_eq!(u.support().len(), 4);
        let h = HorizonPrior::Finite(u);
        assert!((h.stop_prob(3).unwrap() - 0.5).abs() < 1e-15);
        assert!(h.stop_prob(5).is_err());
        assert_eq!(h.sample_horizon_with(3.0, 0.49), 3.0);
        assert_eq!(h.sample_horizon_with(3.0, 0.51), 4.0);
        let g = HorizonPrior::Geometric(GeometricPrior::new(0.25).unwrap());
        assert!((g.stop_prob(9).unwrap() - 0.25).abs() < 1e-15);
        let mean = g
            .conditional_expectation(1.0, Growth::polynomial(1.0), |x| x)
            .unwrap();
        assert!((mean - 4.0).abs() < 1e-12);
        assert!(FinitePrior::new([(0, 1.0)]).is_err());
    }

    #[test]
    fn gamma_ratio_reference() {
        assert!((gamma_ratio(2.0) - 1.772_453_850_905_516_0).abs() < 1e-10);
        assert!((gamma_ratio(2.35) - 0.924_716_034_232_442_13).abs() < 1e-10);
        assert!((gamma_ratio(3.0) - 0.443_113_462_726_379_01).abs() < 1e-10);
    }

    #[test]
    fn bound_examples() {
        let pretend = BoundSpec::PretendHedge { d: 2.35, n: 2 };
        assert!((pretend.coefficient().unwrap() / c_n(2) - 2.987_107_563_721_925).abs() < 1e-9);
        let v = eval_bound(&pretend, 400.0).unwrap();
        assert!((v / (3.0 * c_n(2) * 20.0) - 1.0).abs() < 0.01);
        let ball = eval_bound(&BoundSpec::BallAdaptive, 400.0).unwrap();
        assert!((ball - 20.0 * std::f64::consts::PI).abs() < 1e-12);
        let fpl = eval_bound(&BoundSpec::fpl_default(4), 100.0).unwrap();
        assert!((fpl / 20.0 - 4.559).abs() < 1e-3, "{fpl}");
        let ew = BoundSpec::exp_weights_optimal(4.0, 4)
            .coefficient()
            .unwrap();
        assert!((ew - 1.014_185).abs() < 1e-5, "{ew}");
        let fo = BoundSpec::FirstOrder {
            d: 2.5 + 2f64.sqrt(),
            n: 4,
        }
        .coefficient()
        .unwrap();
        assert!((fo - (1.5 + 2f64.sqrt())).abs() < 1e-12);
        assert!(BoundSpec::PretendHedge { d: 1.4, n: 2 }.eval(1.0).is_err());
        assert!(BoundSpec::BallAdaptive.eval(-1.0).is_err());
    }

    #[test]
    fn large_exponent_bound_approaches_one() {
        let c = BoundSpec::exp_weights_optimal(1e6, 4)
            .coefficient()
            .unwrap();
        assert!((c - 1.0).abs() < 1e-3);
    }
}
