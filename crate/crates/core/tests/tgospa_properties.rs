mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tgospa::boxmetrics::{BoundingBox, BoxMetric};
use tgospa::tgospa::{
    evaluate, evaluate_assignment, exact, gamma_extreme, gamma_zero, lp, EvalOptions, ExactOptions, LpOptions,
    Solver, TgospaParams,
};
use tgospa::trajectories::TrajectorySet;
use tgospa::Error;

fn exact_total(x: &TrajectorySet<BoundingBox>, y: &TrajectorySet<BoundingBox>, params: &TgospaParams) -> f64 {
    exact(x, y, params, &BoxMetric::Iou, &ExactOptions::default()).unwrap().total
}

fn scene_strategy() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 1usize..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_is_a_metric((seed, steps) in scene_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_params(&mut rng);
        let x = random_set(&mut rng, 3, steps);
        let y = random_set(&mut rng, 3, steps);
        let z = random_set(&mut rng, 3, steps);
        let xy = exact_total(&x, &y, &params);
        prop_assert!(exact_total(&x, &x, &params).abs() < 1e-12);
        prop_assert!((xy - exact_total(&y, &x, &params)).abs() < 1e-9);
        prop_assert!(exact_total(&x, &z, &params) <= xy + exact_total(&y, &z, &params) + 1e-9);
    }

    #[test]
    fn decomposition_adds_up((seed, steps) in scene_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_params(&mut rng);
        let x = random_set(&mut rng, 3, steps);
        let y = random_set(&mut rng, 3, steps);
        let r = exact(&x, &y, &params, &BoxMetric::Iou, &ExactOptions::default()).unwrap();
        prop_assert!((r.total.powf(params.p) - r.cost_sum()).abs() < 1e-9);
        let per_step: f64 = r.per_step.iter().map(|s| s.loc_cost + s.miss_cost + s.false_cost + s.switch_cost).sum();
        prop_assert!((per_step - r.cost_sum()).abs() < 1e-9);
        prop_assert_eq!(r.n_proper + r.n_missed, x.instance_count() as f64);
        prop_assert_eq!(r.n_proper + r.n_false, y.instance_count() as f64);
        let again = evaluate_assignment(&x, &y, &params, &BoxMetric::Iou, r.assignment.as_ref().unwrap(), true, Solver::Exact);
        prop_assert!((again.total - r.total).abs() < 1e-12);
    }

    #[test]
    fn limits_bracket_the_exact_value((seed, steps) in scene_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_params(&mut rng);
        let x = random_set(&mut rng, 3, steps);
        let y = random_set(&mut rng, 3, steps);
        let lo = gamma_zero(&x, &y, &params, &BoxMetric::Iou).unwrap().total;
        let mid = exact_total(&x, &y, &params);
        let hi = gamma_extreme(&x, &y, &params, &BoxMetric::Iou).unwrap().total;
        prop_assert!(lo <= mid + 1e-9 && mid <= hi + 1e-9, "{lo} {mid} {hi}");
    }

    #[test]
    fn total_grows_with_gamma((seed, steps) in scene_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_params(&mut rng);
        let x = random_set(&mut rng, 3, steps);
        let y = random_set(&mut rng, 3, steps);
        let mut prev = 0.0;
        for gamma in [0.0, 0.05, 0.2, 0.5, 1.0, 3.0, 10.0] {
            let t = exact_total(&x, &y, &TgospaParams { gamma, ..params });
            prop_assert!(t >= prev - 1e-9);
            prev = t;
        }
    }
}

#[test]
fn gamma_zero_matches_exact_without_switch_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let mut params = random_params(&mut rng);
        params.gamma = 0.0;
        let steps = rng.gen_range(1..=5);
        let x = random_set(&mut rng, 3, steps);
        let y = random_set(&mut rng, 3, steps);
        let a = gamma_zero(&x, &y, &params, &BoxMetric::Iou).unwrap();
        let b = exact(&x, &y, &params, &BoxMetric::Iou, &ExactOptions::default()).unwrap();
        assert!((a.total - b.total).abs() < 1e-9);
        assert!(a.gospa_limit);
    }
}

#[test]
fn huge_gamma_matches_the_constant_assignment() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let mut params = random_params(&mut rng);
        params.gamma = 1e3;
        let steps = rng.gen_range(1..=5);
        let x = random_set(&mut rng, 3, steps);
        let y = random_set(&mut rng, 3, steps);
        let a = gamma_extreme(&x, &y, &params, &BoxMetric::Iou).unwrap();
        let b = exact(&x, &y, &params, &BoxMetric::Iou, &ExactOptions::default()).unwrap();
        assert!((a.total - b.total).abs() < 1e-9);
        assert_eq!(b.n_switches, 0.0);
    }
}

#[test]
fn lp_is_a_tight_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let params = random_params(&mut rng);
        let steps = rng.gen_range(1..=5);
        let x = random_set(&mut rng, 3, steps);
        let y = random_set(&mut rng, 3, steps);
        let a = lp(&x, &y, &params, &BoxMetric::Iou, &LpOptions::default()).unwrap();
        let b = exact(&x, &y, &params, &BoxMetric::Iou, &ExactOptions::default()).unwrap();
        assert!(a.total <= b.total + 1e-9);
        if a.is_hard {
            assert!((a.total - b.total).abs() <= 1e-6 * b.total.max(1.0));
            assert!(a.assignment.is_some());
        } else {
            assert!(a.assignment.is_none());
        }
    }
}

#[test]
fn auto_solver_selection() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = random_set(&mut rng, 3, 4);
    let y = random_set(&mut rng, 3, 4);
    let opts = EvalOptions::default();
    let zero = TgospaParams::new(1.0, 0.5, 0.0).unwrap();
    let pos = TgospaParams::new(1.0, 0.5, 0.3).unwrap();
    assert_eq!(evaluate(&x, &y, &zero, &BoxMetric::Iou, Solver::Auto, &opts).unwrap().solver, Solver::GammaZero);
    assert_eq!(evaluate(&x, &y, &pos, &BoxMetric::Iou, Solver::Auto, &opts).unwrap().solver, Solver::Exact);
    let tiny = EvalOptions {
        exact: ExactOptions { ceiling: 1 },
        ..opts
    };
    assert_eq!(evaluate(&x, &y, &pos, &BoxMetric::Iou, Solver::Auto, &tiny).unwrap().solver, Solver::Lp);
    assert!(matches!(
        evaluate(&x, &y, &pos, &BoxMetric::Iou, Solver::Exact, &tiny),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn empty_estimate_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let params = random_params(&mut rng);
        let steps = rng.gen_range(1..=5);
        let x = random_set(&mut rng, 3, steps);
        let m = x.instance_count() as f64;
        let expected = (m * params.c.powf(params.p) / 2.0).powf(1.0 / params.p);
        let empty = TrajectorySet::empty(steps - 1);
        for solver in [Solver::Exact, Solver::Lp, Solver::GammaZero, Solver::GammaExtreme] {
            let mut params = params;
            if solver == Solver::GammaZero {
                params.gamma = 0.0;
            }
            let r = evaluate(&x, &empty, &params, &BoxMetric::Iou, solver, &EvalOptions::default()).unwrap();
            assert!((r.total - expected).abs() < 1e-12, "{solver}");
            assert_eq!(r.n_missed, m);
        }
    }
}

#[test]
fn alternative_box_metrics_are_accepted() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = random_set(&mut rng, 2, 3);
    let y = random_set(&mut rng, 2, 3);
    let params = TgospaParams::new(2.0, 3.0, 1.0).unwrap();
    for metric in BoxMetric::ALL {
        let r = exact(&x, &y, &params, &metric, &ExactOptions::default()).unwrap();
        assert!(r.total.is_finite());
        assert!(exact(&x, &x, &params, &metric, &ExactOptions::default()).unwrap().total.abs() < 1e-12);
    }
}
