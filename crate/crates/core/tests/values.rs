use horizon_core::game_solver::{exact_v, FiniteLossSpace};
use horizon_core::hedge_values::{c_n, two_action_game_value, RandomWalkTable};
use horizon_core::CumulativeLossVector;

/// `E[min_i M_i]` after `r` uniform basis-vector rounds, by enumerating all `n^r` paths.
fn brute_force_r(m: &[f64], r: u32) -> f64 {
    let n = m.len();
    let paths = n.pow(r);
    let mut total = 0.0;
    for mut code in 0..paths {
        let mut cur = m.to_vec();
        for _ in 0..r {
            cur[code % n] += 1.0;
            code /= n;
        }
        total += cur.iter().copied().fold(f64::INFINITY, f64::min);
    }
    total / paths as f64
}

#[test]
fn random_walk_matches_enumeration() {
    for (m, r) in [
        (vec![0.0, 0.0], 6u32),
        (vec![1.0, 0.0, 2.0], 5),
        (vec![0.0, 3.0, 1.0, 1.0], 4),
    ] {
        let table = RandomWalkTable::new(m.len()).unwrap();
        let got = table
            .random_walk_r(&CumulativeLossVector::new(m.clone()).unwrap(), r)
            .unwrap();
        assert!((got - brute_force_r(&m, r)).abs() < 1e-12, "{m:?} {r}");
    }
}

#[test]
fn value_is_r_over_n_minus_r() {
    let table = RandomWalkTable::new(3).unwrap();
    let zero = CumulativeLossVector::zeros(3);
    for t in 0..=6 {
        let v = table.minimax_v(&zero, t).unwrap();
        assert!((v - (t as f64 / 3.0 - brute_force_r(&[0.0; 3], t))).abs() < 1e-12);
    }
}

#[test]
fn two_action_closed_form_small_horizons() {
    let frozen = [0.0, 0.5, 0.5, 0.75, 0.75, 0.9375, 0.9375];
    for (t, &s) in frozen.iter().enumerate() {
        assert!((two_action_game_value(t as u64) - s).abs() < 1e-12, "T={t}");
        assert!((s - (t as f64 / 2.0 - brute_force_r(&[0.0, 0.0], t as u32))).abs() < 1e-12);
    }
}

#[test]
fn bound_holds_at_zero_state() {
    for n in 2..=4 {
        let table = RandomWalkTable::new(n).unwrap();
        let zero = CumulativeLossVector::zeros(n);
        for t in 0..=12 {
            assert!(table.minimax_v(&zero, t).unwrap() <= c_n(n) * (t as f64).sqrt() + 1e-12);
        }
    }
}

#[test]
fn basis_space_game_equals_random_walk_value() {
    let table = RandomWalkTable::new(3).unwrap();
    let m = CumulativeLossVector::new(vec![0.0, 1.0, 1.0]).unwrap();
    for r in 1..=3 {
        let lp = exact_v(&FiniteLossSpace::basis(3), &m, r).unwrap();
        assert!((lp - table.minimax_v(&m, r).unwrap()).abs() < 1e-9, "r={r}");
    }
}
