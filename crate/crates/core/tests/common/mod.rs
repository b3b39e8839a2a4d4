//! Fixtures and random scene generators shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use tgospa::boxmetrics::BoundingBox;
use tgospa::tgospa::TgospaParams;
use tgospa::trajectories::{Trajectory, TrajectorySet};

pub fn bx(left: f64, top: f64) -> BoundingBox {
    BoundingBox::new(left, top, 10.0, 10.0).unwrap()
}

/// Three boxes with pairwise zero overlap.
pub fn a() -> BoundingBox {
    bx(0.0, 0.0)
}
pub fn b() -> BoundingBox {
    bx(100.0, 0.0)
}
pub fn z() -> BoundingBox {
    bx(500.0, 500.0)
}

fn two_step(trajs: Vec<Vec<BoundingBox>>) -> TrajectorySet<BoundingBox> {
    TrajectorySet::new(
        trajs
            .into_iter()
            .map(|t| Trajectory::single(0, t).unwrap())
            .collect(),
        1,
    )
    .unwrap()
}

/// The toy examples: two ground-truth trajectories over two steps, each with
/// perfect localization where an estimate is present.
pub struct Toy {
    pub name: &'static str,
    pub x: TrajectorySet<BoundingBox>,
    pub y: TrajectorySet<BoundingBox>,
}

pub fn toy_examples() -> Vec<Toy> {
    let gt = || two_step(vec![vec![a(), a()], vec![b(), b()]]);
    vec![
        // Both estimates swap objects after the first step.
        Toy {
            name: "Ex1",
            x: gt(),
            y: two_step(vec![vec![a(), b()], vec![b(), a()]]),
        },
        // One object is lost at the second step and one false box appears.
        Toy {
            name: "Ex2",
            x: gt(),
            y: two_step(vec![vec![a(), a()], vec![b(), z()]]),
        },
        // One object is missed and a far-off estimate is false throughout.
        Toy {
            name: "Ex3",
            x: gt(),
            y: two_step(vec![vec![a(), a()], vec![z(), z()]]),
        },
        // Nothing is estimated.
        Toy {
            name: "Ex4",
            x: gt(),
            y: TrajectorySet::empty(1),
        },
        // Nothing is detected correctly; two false boxes.
        Toy {
            name: "Ex5",
            x: gt(),
            y: two_step(vec![vec![z(), z()]]),
        },
    ]
}

/// A random box in a small area so that overlaps are common.
pub fn random_box(rng: &mut impl Rng) -> BoundingBox {
    BoundingBox::new(
        rng.gen_range(0.0..3.0),
        rng.gen_range(0.0..3.0),
        rng.gen_range(0.5..3.0),
        rng.gen_range(0.5..3.0),
    )
    .unwrap()
}

/// Up to `max_trajs` trajectories over `steps` steps, possibly with gaps.
pub fn random_set(rng: &mut impl Rng, max_trajs: usize, steps: usize) -> TrajectorySet<BoundingBox> {
    let n = rng.gen_range(0..=max_trajs);
    let trajs = (0..n)
        .map(|_| {
            let start = rng.gen_range(0..steps);
            let end = rng.gen_range(start..steps);
            let mut instances = Vec::new();
            for k in start..=end {
                if k == start || k == end || rng.gen_bool(0.8) {
                    instances.push((k, random_box(rng)));
                }
            }
            Trajectory::from_instances(instances).unwrap()
        })
        .collect();
    TrajectorySet::new(trajs, steps - 1).unwrap()
}

/// Random valid parameters with `γ > 0`.
pub fn random_params(rng: &mut impl Rng) -> TgospaParams {
    TgospaParams::new(rng.gen_range(1.0..3.0), rng.gen_range(0.1..1.0), rng.gen_range(0.01..1.5)).unwrap()
}

/// Points on a line, one trajectory per row of `(start, positions)`.
pub fn line_set(trajs: &[(usize, Vec<f64>)], horizon: usize) -> TrajectorySet<f64> {
    TrajectorySet::new(
        trajs
            .iter()
            .map(|(s, v)| Trajectory::single(*s, v.clone()).unwrap())
            .collect(),
        horizon,
    )
    .unwrap()
}

/// Two objects at 0 and 10 over `steps` steps; one estimate follows the first
/// except at step `t`, where it sits at distance `delta` from the second.
pub fn short_term_scene(steps: usize, t: usize, delta: f64) -> (TrajectorySet<f64>, TrajectorySet<f64>) {
    let x = line_set(&[(0, vec![0.0; steps]), (0, vec![10.0; steps])], steps - 1);
    let mut y = vec![0.0; steps];
    y[t] = 10.0 + delta;
    (x, line_set(&[(0, y)], steps - 1))
}

/// Two objects at 0 and 10; one estimate follows the first for `t` steps,
/// then sits at distance `delta` from the second for `len` steps and ends.
/// The objects persist for `tail` further steps.
pub fn long_term_scene(t: usize, len: usize, tail: usize, delta: f64) -> (TrajectorySet<f64>, TrajectorySet<f64>) {
    let steps = t + len + tail;
    let x = line_set(&[(0, vec![0.0; steps]), (0, vec![10.0; steps])], steps - 1);
    let mut y = vec![0.0; t];
    y.extend(std::iter::repeat(10.0 + delta).take(len));
    (x, line_set(&[(0, y)], steps - 1))
}
