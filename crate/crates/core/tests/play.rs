use horizon_core::arena::{
    max_regret_curve, run_game, AdversarySpec, AlternatingBasis, TrialBatchConfig,
};
use horizon_core::learners::{Decision, FixedMinimaxHedge, Learner, LearnerSpec, Setting};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_known_spec_builds_and_plays() {
    let hedge = [
        "fixed_minimax:T=12",
        "pretend_hedge",
        "last_round_hedge",
        "exp_weights",
        "fpl",
        "first_order",
    ];
    let ball = [
        "ball_minimax:T=12",
        "ball_adaptive",
        "ogd",
        "last_round_ball",
        "doubling:base=ball_minimax",
    ];
    for (names, adv) in [(&hedge[..], "random_basis"), (&ball[..], "ball")] {
        for name in names {
            let spec: LearnerSpec = name.parse().unwrap();
            let mut learner = spec.build(2).unwrap();
            let mut adversary = adv
                .parse::<AdversarySpec>()
                .unwrap()
                .build(2, spec.setting())
                .unwrap();
            let trace = run_game(learner.as_mut(), adversary.as_mut(), 12, 4).unwrap();
            assert_eq!(trace.rows.len(), 12, "{name}");
            assert!((trace.recomputed_comparator() - trace.rows[11].comparator).abs() < 1e-12);
        }
    }
}

#[test]
fn spec_strings_round_trip() {
    let spec: LearnerSpec = "exp_weights:mode=pretend,d=4".parse().unwrap();
    let again: LearnerSpec = spec.to_string().parse().unwrap();
    assert_eq!(spec, again);
    assert_eq!(spec.setting(), Setting::Hedge);
    assert!("no_such_learner".parse::<LearnerSpec>().is_err());
}

#[test]
fn fixed_minimax_regret_never_exceeds_game_value() {
    let mut learner = FixedMinimaxHedge::new(2, 10).unwrap();
    let trace = run_game(&mut learner, &mut AlternatingBasis { n: 2 }, 10, 0).unwrap();
    assert!(trace.final_regret() <= horizon_core::hedge_values::two_action_game_value(10) + 1e-12);
}

#[test]
fn decisions_are_distributions_for_hedge() {
    let mut learner = FixedMinimaxHedge::new(3, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    match learner.decide(&mut rng).unwrap() {
        Decision::Distribution(p) => assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12),
        other => panic!("unexpected decision {other:?}"),
    }
}

#[test]
fn batch_curve_is_monotone_in_trials() {
    let mut config = TrialBatchConfig {
        learners: vec!["ball_adaptive".parse().unwrap()],
        adversary: "sphere".parse().unwrap(),
        n: 3,
        horizon: 50,
        trials: 4,
        grid: vec![10, 50],
        seed_base: 2,
        parallelism: 2,
    };
    let few = max_regret_curve(&config).unwrap();
    config.trials = 16;
    let many = max_regret_curve(&config).unwrap();
    for j in 0..2 {
        assert!(many.max_regret[0][j] >= few.max_regret[0][j]);
    }
}
