//! Criteria 8 to 14: learners played through the arena.

use horizon_core::arena::{
    exhaustive_adversary_search, max_regret_curve, run_game, AdversarySpec, AlternatingBasis,
    AlternatingSign, Replay, TrialBatchConfig, DEFAULT_SEARCH_BUDGET,
};
use horizon_core::game_solver::FiniteLossSpace;
use horizon_core::hedge_values::c_n;
use horizon_core::learners::{
    ball_adaptive_coefficient, fpl_normalization_estimate, fpl_radial_cdf, ExpWeights, FplPretend,
    LastRoundBall, LastRoundHedge, LearnerSpec, PriorAveragedHedge, Setting,
};
use horizon_core::numeric::quad::{integrate_to_infinity, QuadConfig};
use horizon_core::priors::{BoundSpec, FinitePrior, HorizonPrior};
use horizon_core::CumulativeLossVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{Check, Context, Outcome};
use crate::error::{CliError, CliResult};

fn spec(s: &str) -> CliResult<LearnerSpec> {
    Ok(s.parse()?)
}

fn adversary(s: &str) -> CliResult<AdversarySpec> {
    Ok(s.parse()?)
}

/// Last-round Hedge against alternating basis vectors for 20 rounds.
pub fn last_round_hedge() -> CliResult<Check> {
    let mut hedge = LastRoundHedge::new(2)?;
    let tr = run_game(&mut hedge, &mut AlternatingBasis { n: 2 }, 20, 0)?;
    Ok(Check::close(
        "last-round Hedge vs alternating basis, T=20",
        tr.final_regret(),
        5.0,
        1e-9,
    ))
}

/// Last-round ball learner against `e_1, -e_1, ...` for 20 rounds.
pub fn last_round_ball() -> CliResult<Check> {
    let mut ball = LastRoundBall::new(2);
    let tr = run_game(&mut ball, &mut AlternatingSign { n: 2 }, 20, 0)?;
    Ok(Check::close(
        "last-round ball vs alternating sign, T=20",
        tr.final_regret(),
        5.0 * 2f64.sqrt(),
        1e-9,
    ))
}

pub fn last_round(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    out.push(last_round_hedge()?);
    out.push(last_round_ball()?);
    Ok(out)
}

/// `-∫_t^∞ (t / T^2) (c + T - t)^{-1/2} dT` by adaptive quadrature.
fn quadrature_coefficient(c: f64, t: f64) -> CliResult<f64> {
    let r = integrate_to_infinity(
        |big_t| t / (big_t * big_t) / (c + big_t - t).sqrt(),
        t,
        QuadConfig::with_rel_tol(1e-12),
    )?;
    Ok(-r.value)
}

pub fn ball_closed_form(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let mut worst = 0.0f64;
    let mut near = 0.0f64;
    for t in [1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 300.0, 1000.0] {
        for w in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0] {
            let c = 1.0 + w * w;
            worst =
                worst.max((ball_adaptive_coefficient(c, t) - quadrature_coefficient(c, t)?).abs());
        }
        for c in [t - 1e-9, t, t + 1e-9] {
            if c >= 1.0 {
                near = near
                    .max((ball_adaptive_coefficient(c, t) - quadrature_coefficient(c, t)?).abs());
            }
        }
    }
    out.push(Check::at_most(
        "max deviation over (t, ||W||) grid",
        worst,
        1e-6,
    ));
    out.push(Check::at_most(
        "max deviation at |c - t| <= 1e-9",
        near,
        1e-6,
    ));
    Ok(out)
}

fn final_regret(
    learner: &LearnerSpec,
    adv: &str,
    n: usize,
    horizon: u64,
    seed: u64,
) -> CliResult<f64> {
    let mut l = learner.build(n)?;
    let mut a = adversary(adv)?.build(n, l.setting())?;
    Ok(run_game(l.as_mut(), a.as_mut(), horizon, seed)?.final_regret())
}

/// Largest final regret over the named adversaries, each with `seeds` seeds.
fn worst_regret(
    learner: &str,
    adversaries: &[&str],
    n: usize,
    horizon: u64,
    seeds: u64,
) -> CliResult<f64> {
    let learner = spec(learner)?;
    let mut worst = f64::NEG_INFINITY;
    for adv in adversaries {
        for seed in 0..seeds {
            worst = worst.max(final_regret(&learner, adv, n, horizon, seed)?);
        }
    }
    Ok(worst)
}

/// Random loss vectors in `[0, 1]^n`, with action 0's losses capped at `first_cap`.
fn uniform_losses(rng: &mut ChaCha8Rng, n: usize, horizon: u64, first_cap: f64) -> Vec<Vec<f64>> {
    (0..horizon)
        .map(|_| {
            (0..n)
                .map(|i| rng.gen::<f64>() * if i == 0 { first_cap } else { 1.0 })
                .collect()
        })
        .collect()
}

/// Mean regret of FPL over `seeds` learner streams on one fixed sequence.
fn fpl_pseudo_regret(seq: &[Vec<f64>], n: usize, seeds: u64) -> CliResult<f64> {
    let mut total = 0.0;
    for seed in 0..seeds {
        let mut learner = FplPretend::with_defaults(n)?;
        let mut adv = Replay::new(Setting::Hedge, seq.to_vec())?;
        total += run_game(&mut learner, &mut adv, seq.len() as u64, seed)?.final_regret();
    }
    Ok(total / seeds as f64)
}

pub fn regret_bounds(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();

    let ball = worst_regret("ball_adaptive", &["sphere", "ball"], 10, 1000, 5)?.max(worst_regret(
        "ball_adaptive",
        &["alternating_sign"],
        10,
        1000,
        1,
    )?);
    out.push(Check::at_most(
        "ball_adaptive, N=10, T=1000, worst of sphere/ball/alternating_sign",
        ball,
        std::f64::consts::PI * 1000f64.sqrt() + 10.0,
    ));

    let hedge_bound = |t: f64| 3.0 * c_n(2) * t.sqrt() + 2.0;
    let hedge = worst_regret(
        "pretend_hedge:d=2.35",
        &["random_basis", "alternating"],
        2,
        400,
        3,
    )?;
    out.push(Check::at_most(
        "pretend_hedge d=2.35, N=2, T=400, worst of random/alternating",
        hedge,
        hedge_bound(400.0),
    ));
    let exhaustive = exhaustive_adversary_search(
        &PriorAveragedHedge::pretend(2, 2.35)?,
        &FiniteLossSpace::basis(2),
        8,
        DEFAULT_SEARCH_BUDGET,
    )?;
    out.push(Check::at_most(
        "pretend_hedge d=2.35, N=2, exhaustive T=8",
        exhaustive.regret,
        hedge_bound(8.0),
    ));

    let ew = worst_regret(
        "exp_weights:mode=pretend,d=4",
        &["random_cube", "random_basis", "alternating", "greedy"],
        4,
        400,
        3,
    )?;
    out.push(Check::at_most(
        "exp_weights pretend d=4 optimal b, N=4, T=400",
        ew,
        BoundSpec::exp_weights_optimal(4.0, 4).eval(400.0)? + 3.0,
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut fpl = f64::NEG_INFINITY;
    for _ in 0..3 {
        fpl = fpl.max(fpl_pseudo_regret(
            &uniform_losses(&mut rng, 4, 400, 1.0),
            4,
            100,
        )?);
    }
    let alternating: Vec<Vec<f64>> = (0..400)
        .map(|t| (0..4).map(|i| if i == t % 4 { 1.0 } else { 0.0 }).collect())
        .collect();
    fpl = fpl.max(fpl_pseudo_regret(&alternating, 4, 100)?);
    out.push(Check::at_most(
        "fpl pseudo-regret over 100 seeds, N=4, T=400",
        fpl,
        4.6 * 1600f64.sqrt() + 5.0,
    ));

    let d = horizon_core::learners::FirstOrder::default_d();
    let mut worst: Option<(f64, f64, f64)> = None;
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let seq = uniform_losses(&mut rng, 4, 400, 0.2);
        let best = (0..4)
            .map(|i| seq.iter().map(|z| z[i]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let mut learner = spec("first_order")?.build(4)?;
        let mut adv = Replay::new(Setting::Hedge, seq)?;
        let regret = run_game(learner.as_mut(), &mut adv, 400, seed)?.final_regret();
        let bound = BoundSpec::FirstOrder { d, n: 4 }.eval(best)? + 5.0;
        if worst.is_none_or(|(r, b, _)| regret - bound > r - b) {
            worst = Some((regret, bound, best));
        }
    }
    let (regret, bound, m_star) = worst.expect("three sequences were played");
    out.push(Check::at_most(
        format!("first_order, N=4, T=400, m* = {m_star:.1}"),
        regret,
        bound,
    ));
    Ok(out)
}

pub const BALL_CURVES_SEED: u64 = 20_240_601;

pub fn ball_curves_config(parallelism: usize) -> CliResult<TrialBatchConfig> {
    Ok(TrialBatchConfig {
        learners: [
            "ball_adaptive",
            "ogd",
            "doubling:base=ball_minimax",
            "ball_minimax:T=1000",
        ]
        .iter()
        .map(|s| spec(s))
        .collect::<CliResult<_>>()?,
        adversary: adversary("sphere")?,
        n: 10,
        horizon: 1000,
        trials: 200,
        grid: vec![300, 1000],
        seed_base: BALL_CURVES_SEED,
        parallelism,
    })
}

pub fn ball_curves(ctx: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let table = max_regret_curve(&ball_curves_config(ctx.parallelism)?)?;
    let at = |k: usize, t: u64| table.at(k, t).expect("grid holds 300 and 1000");
    let (adaptive, ogd, doubling, minimax) = (0, 1, 2, 3);
    out.push(Check::below(
        "ball_adaptive vs ogd at t=1000",
        at(adaptive, 1000),
        at(ogd, 1000),
    ));
    out.push(Check::below(
        "ogd vs doubling(ball_minimax) at t=1000",
        at(ogd, 1000),
        at(doubling, 1000),
    ));
    out.push(Check::below(
        "ball_adaptive vs ball_minimax(1000) at t=300",
        at(adaptive, 300),
        at(minimax, 300),
    ));
    out.push(Check::below(
        "ball_minimax(1000) vs ball_adaptive at t=1000",
        at(minimax, 1000),
        at(adaptive, 1000),
    ));
    Ok(out)
}

pub fn large_d_limit(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let pretend = ExpWeights::pretend(4, 50.0, 8.0)?;
    let varying = ExpWeights::time_varying(4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut m = CumulativeLossVector::zeros(4);
    let mut worst = 0.0f64;
    for t in 1..=100u64 {
        let a = pretend.weights_at(&m, t)?;
        let b = varying.weights_at(&m, t)?;
        worst = worst.max(a.max_abs_diff(&b));
        let z: Vec<f64> = (0..4).map(|_| rng.gen()).collect();
        m.add(&z);
    }
    out.push(Check::at_most(
        "max weight difference, d=50 vs time-varying, 100 rounds",
        worst,
        1e-3,
    ));
    Ok(out)
}

/// `ρ` with `fpl_radial_cdf(ρ) = p`.
fn radial_quantile(p: f64, n: usize, d: f64) -> f64 {
    let nf = n as f64;
    let c = (d - 1.0) / (d - 1.0 + nf / 2.0);
    if p <= c {
        (p / c).powf(1.0 / nf)
    } else {
        (1.0 - (p - c) * (2.0 * d - 2.0) / (c * nf)).powf(1.0 / (2.0 - 2.0 * d))
    }
}

pub fn fpl_density(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let (n, t) = (4usize, 5u64);
    let mut fpl = FplPretend::with_defaults(n)?;
    let (d, b) = (fpl.d(), fpl.b());
    let (mass, se) = fpl_normalization_estimate(n, t as f64, d, b, 1_000_000, 13);
    out.push(Check::new(
        "density mass, 1e6 importance samples",
        format!("{mass:.6} (se {se:.1e})"),
        "1 ± 1e-3",
        (mass - 1.0).abs() <= 1e-3,
    ));

    fpl.set_state(t, CumulativeLossVector::zeros(n))?;
    let delta = fpl.delta(t as f64);
    let cells = 20usize;
    let edges: Vec<f64> = (1..cells)
        .map(|k| radial_quantile(k as f64 / cells as f64, n, d))
        .collect();
    let samples = 100_000usize;
    let mut counts = vec![0usize; cells];
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..samples {
        let xi = fpl.sample_perturbation(&mut rng).xi;
        let rho = xi.iter().copied().fold(0.0, f64::max) / delta;
        counts[edges.partition_point(|&e| e < rho)] += 1;
    }
    let expected = samples as f64 / cells as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let p = 1.0
        - ChiSquared::new((cells - 1) as f64)
            .map_err(|e| CliError::config(e.to_string()))?
            .cdf(chi2);
    out.push(Check::at_least(
        "radial chi-square p-value, 20 cells, 1e5 samples",
        p,
        0.01,
    ));
    let lo = fpl_radial_cdf(edges[0], n, d);
    out.push(Check::close(
        "radial CDF at first cell edge",
        lo,
        1.0 / cells as f64,
        1e-12,
    ));

    let mut hedge = PriorAveragedHedge::pretend(2, 2.35)?.two_stage();
    let m = CumulativeLossVector::new(vec![3.0, 1.0])?;
    hedge.set_state(5, m.clone())?;
    let p1 = hedge.weights_at(&m, 5)?.weights()[1];
    let draws = 100_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut ones = 0usize;
    for _ in 0..draws {
        ones += hedge.draw_action(&mut rng)?;
    }
    let freq = ones as f64 / draws as f64;
    let sigma = (p1 * (1.0 - p1) / draws as f64).sqrt();
    out.push(Check::new(
        "two-stage draw frequency of action 2, t=5, M=(3,1)",
        format!("{freq:.5}"),
        format!("{p1:.5} ± 3σ ({:.5})", 3.0 * sigma),
        (freq - p1).abs() <= 3.0 * sigma,
    ));
    Ok(out)
}

pub fn negative_priors(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let m = CumulativeLossVector::new(vec![5.0, 4.0])?;
    let uniform =
        PriorAveragedHedge::new(2, HorizonPrior::Finite(FinitePrior::uniform(1, 10_000)?))?;
    let dev = |w: &[f64]| w.iter().map(|p| (p - 0.5).abs()).fold(0.0, f64::max);
    let u = dev(uniform.weights_at(&m, 10)?.weights());
    out.push(Check::at_most(
        "uniform{1..1e4} prior: deviation from uniform, t=10, M=(5,4)",
        u,
        1e-2,
    ));
    let pretend = PriorAveragedHedge::pretend(2, 2.35)?;
    let p = dev(pretend.weights_at(&m, 10)?.weights());
    out.push(Check::at_least(
        "pretend d=2.35: deviation from uniform, t=10, M=(5,4)",
        p,
        0.05,
    ));
    Ok(out)
}
