//! Criteria 1 to 7: exact values, bounds and properties of the value functions.

use horizon_core::game_solver::{
    conditional_average_distribution, exact_v, random_horizon_value, scaled_lower_bound,
    ExactSolver, FiniteLossSpace,
};
use horizon_core::hedge_values::{c_n, estimate_r, two_action_game_value, RandomWalkTable};
use horizon_core::priors::FinitePrior;
use horizon_core::CumulativeLossVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Check, Context, Outcome};
use crate::error::CliResult;

const EXACT: f64 = 1e-9;

fn cv(v: &[f64]) -> CumulativeLossVector {
    CumulativeLossVector::new(v.to_vec()).expect("literal loss vectors are valid")
}

fn dist_check(label: &str, got: &[f64], want: &[f64], tol: f64) -> Check {
    let diff = got
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Check::new(
        label,
        format!("{got:.10?}"),
        format!("{want:.6?} ± {tol:e}"),
        diff <= tol,
    )
}

pub fn example_one(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let space = FiniteLossSpace::complemented_basis(3);
    let solver = ExactSolver::new(space.clone());
    let m2 = cv(&[1.0, 1.0, 2.0]);
    let one = solver.solution(&m2, 1)?;
    out.push(Check::close("V(M2,1)", one.value, -0.5, EXACT));
    out.push(dist_check(
        "P^3",
        one.distribution.weights(),
        &[0.5, 0.5, 0.0],
        EXACT,
    ));
    let two = solver.solution(&m2, 2)?;
    out.push(Check::close("V(M2,2)", two.value, -4.0 / 9.0, EXACT));
    out.push(dist_check(
        "P^4",
        two.distribution.weights(),
        &[4.0 / 9.0, 4.0 / 9.0, 1.0 / 9.0],
        EXACT,
    ));
    let prior = FinitePrior::new([(3, 0.5), (4, 0.5)])?;
    let star = random_horizon_value(&space, &prior, 3, &m2)?;
    out.push(Check::close("V'", star.value, -0.5, EXACT));
    out.push(dist_check(
        "P*",
        star.distribution.weights(),
        &[0.5, 0.5, 0.0],
        EXACT,
    ));
    let avg = conditional_average_distribution(&space, &prior, 3, &m2)?;
    out.push(dist_check(
        "E[P^T|T>=3]",
        avg.weights(),
        &[17.0 / 36.0, 17.0 / 36.0, 1.0 / 18.0],
        EXACT,
    ));
    out.push(Check::at_least(
        "max |E[P^T|T>=3] - P*|",
        avg.max_abs_diff(&star.distribution),
        1.0 / 36.0,
    ));
    Ok(out)
}

pub fn closed_form(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let table = RandomWalkTable::new(2)?;
    let ls2 = ExactSolver::new(FiniteLossSpace::binary(2));
    let zero = CumulativeLossVector::zeros(2);
    let (mut walk, mut game) = (0.0f64, 0.0f64);
    for t in 1..=10u32 {
        let s = two_action_game_value(t as u64);
        walk = walk.max((s - table.minimax_v(&zero, t)?).abs());
        game = game.max((s - ls2.value(&zero, t)?).abs());
    }
    out.push(Check::at_most(
        "max |S(T) - minimax_V((0,0),T)|, T<=10",
        walk,
        EXACT,
    ));
    out.push(Check::at_most(
        "max |S(T) - exact_V(LS2,0,T)|, T<=10",
        game,
        EXACT,
    ));
    Ok(out)
}

pub fn separation(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let zero = CumulativeLossVector::zeros(3);
    for t in 1..=3u32 {
        let v1 = exact_v(&FiniteLossSpace::basis(3), &zero, t)?;
        let v2 = exact_v(&FiniteLossSpace::binary(3), &zero, t)?;
        out.push(Check::at_least(
            format!("V_LS2 - V_LS1, N=3, T={t}"),
            v2 - v1,
            1e-6,
        ));
    }
    for n in [3usize, 4] {
        let mut m = vec![0.0; n];
        m[0] = 1.0;
        let v = exact_v(&FiniteLossSpace::binary(n), &cv(&m), 1)?;
        out.push(Check::close(
            format!("base case V_LS2((1,0,..),1), N={n}"),
            v,
            (n as f64 - 2.0) / (n as f64 - 1.0),
            EXACT,
        ));
    }
    Ok(out)
}

pub fn lower_bound(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let g60 = scaled_lower_bound(60)?;
    out.push(Check::close("G(60)", g60, std::f64::consts::SQRT_2, 1e-6));
    let values = [8u64, 16, 32, 60]
        .iter()
        .map(|&t| scaled_lower_bound(t))
        .collect::<Result<Vec<_>, _>>()?;
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    out.push(Check::new(
        "G(8) > G(16) > G(32) > G(60)",
        format!("{values:.9?}"),
        "strictly decreasing",
        decreasing,
    ));
    Ok(out)
}

pub fn value_bound(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    for n in 2..=5usize {
        let table = RandomWalkTable::new(n)?;
        let zero = CumulativeLossVector::zeros(n);
        let mut worst = f64::NEG_INFINITY;
        for t in 0..=20u32 {
            worst = worst.max(table.minimax_v(&zero, t)? - c_n(n) * (t as f64).sqrt());
        }
        out.push(Check::at_most(
            format!("max_T<=20 V(0,T) - c_N sqrt(T), N={n}"),
            worst,
            1e-12,
        ));
    }
    for (k, (m, r)) in [
        (vec![0.0, 0.0], 3u32),
        (vec![0.0, 0.0, 0.0], 2),
        (vec![1.0, 0.0, 0.0], 4),
        (vec![2.0, 0.0, 1.0, 0.0], 6),
    ]
    .into_iter()
    .enumerate()
    {
        let m = cv(&m);
        let exact = RandomWalkTable::new(m.n())?.random_walk_r(&m, r)?;
        let (est, se) = estimate_r(&m, r, 100_000, 1000 + k as u64)?;
        out.push(Check::new(
            format!("estimate_R({:?}, {r})", m.losses()),
            format!("{est:.5} (se {se:.5})"),
            format!("{exact:.5} ± 3 se"),
            (est - exact).abs() <= 3.0 * se,
        ));
    }
    Ok(out)
}

pub fn random_horizon(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let prior = FinitePrior::uniform(1, 5)?;
    let zero = CumulativeLossVector::zeros(2);
    let v = random_horizon_value(&FiniteLossSpace::basis(2), &prior, 1, &zero)?.value;
    let expected = (1..=5u64).map(two_action_game_value).sum::<f64>() / 5.0;
    out.push(Check::close("V̄_1(0), T ~ U{1..5}", v, expected, EXACT));
    Ok(out)
}

const INSTANCES: usize = 200;
const PROP_TOL: f64 = 1e-12;

fn random_state(rng: &mut ChaCha8Rng) -> (usize, Vec<f64>, u32) {
    let n = rng.gen_range(2..=4usize);
    let m = (0..n).map(|_| rng.gen_range(0..=10) as f64).collect();
    (n, m, rng.gen_range(0..=6u32))
}

/// Sum of `k <= 4` random basis vectors.
fn random_multiset(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n];
    for _ in 0..rng.gen_range(0..=4) {
        m[rng.gen_range(0..n)] += 1.0;
    }
    m
}

pub fn properties(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let tables: Vec<RandomWalkTable> = (2..=4)
        .map(RandomWalkTable::new)
        .collect::<Result<_, _>>()?;
    let table = |n: usize| &tables[n - 2];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = [0usize; 6];
    for _ in 0..INSTANCES {
        let (n, m, r) = random_state(&mut rng);
        let t = table(n);
        let mv = cv(&m);
        let v = t.minimax_v(&mv, r)?;

        let a = rng.gen_range(-2..=5) as f64;
        let shifted = cv(&m.iter().map(|x| x - a).collect::<Vec<_>>());
        if (v - (t.minimax_v(&shifted, r)? - a)).abs() > 1e-9 {
            violations[0] += 1;
        }

        let i = rng.gen_range(0..n);
        let up = mv.plus_basis(i);
        if t.minimax_v(&up, r)? > v + PROP_TOL
            || t.random_walk_r(&up, r)? < t.random_walk_r(&mv, r)? - PROP_TOL
        {
            violations[1] += 1;
        }

        let r1 = r.max(1);
        if t.random_walk_r(&mv, r1)? - t.random_walk_r(&mv, r1 - 1)? > 1.0 / n as f64 + PROP_TOL {
            violations[2] += 1;
        }

        let w = t.minimax_weights(&mv, r1)?;
        let sum: f64 = w.weights().iter().sum();
        if w.weights().iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > PROP_TOL {
            violations[3] += 1;
        }

        if v > t.minimax_v(&mv, r + 1)? + PROP_TOL {
            violations[4] += 1;
        }

        let m1 = random_multiset(&mut rng, n);
        let m2 = random_multiset(&mut rng, n);
        let both: Vec<f64> = m1.iter().zip(&m2).map(|(a, b)| a + b).collect();
        let rr = rng.gen_range(0..=4u32);
        let lhs = t.minimax_v(&cv(&both), rr)? - t.minimax_v(&cv(&m1), 0)?;
        if lhs > t.minimax_v(&cv(&m2), rr)? + 1e-9 {
            violations[5] += 1;
        }
    }
    for (name, v) in [
        "shift invariance",
        "monotone in M",
        "difference bound 1/N",
        "weights valid",
        "monotone in r",
        "loss-splitting inequality",
    ]
    .iter()
    .zip(violations)
    {
        out.push(Check::new(
            format!("{name} ({INSTANCES} instances)"),
            format!("{v} violations"),
            "0 violations",
            v == 0,
        ));
    }
    Ok(out)
}
