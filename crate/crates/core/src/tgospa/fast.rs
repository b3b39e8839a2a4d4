//! The two limits of the switching penalty that reduce to 2-D assignment:
//! `γ = 0` (GOSPA at every step) and `γ → ∞` (one time-invariant matching of
//! whole trajectories).

use crate::assignment;
use crate::boxmetrics::Metric;
use crate::error::Result;
use crate::trajectories::{AssignmentMatrix, TrajectorySet};

use super::{base_distance, decompose, joint_steps, Solver, TgospaParams, TgospaResult};

/// Optimal GOSPA assignment between two instance sets at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepAssignment {
    /// `Σ dᵖ` over matched pairs plus `cᵖ/2` per missed and false instance
    /// (not rooted).
    pub cost: f64,
    /// Matched `(x index, y index, distance)`, all with distance `< c`.
    pub pairs: Vec<(usize, usize, f64)>,
    pub missed: Vec<usize>,
    pub false_alarms: Vec<usize>,
}

/// GOSPA (α = 2) between the instances of one time step.
pub fn gospa_step<T, M: Metric<T> + ?Sized>(xs: &[&T], ys: &[&T], p: f64, c: f64, metric: &M) -> StepAssignment {
    let cp = c.powf(p);
    let dist: Vec<Vec<f64>> = xs
        .iter()
        .map(|a| ys.iter().map(|b| metric.distance(a, b)).collect())
        .collect();
    // Matching a pair saves cᵖ - dᵖ over leaving both unassigned; pairs at or
    // beyond the cut-off save nothing.
    let sol = assignment::solve(xs.len(), ys.len(), |i, j| dist[i][j].min(c).powf(p) - cp);
    let mut pairs = Vec::new();
    let mut y_matched = vec![false; ys.len()];
    let mut missed = Vec::new();
    for (i, j) in sol.into_iter().enumerate() {
        match j {
            Some(j) if dist[i][j] < c => {
                y_matched[j] = true;
                pairs.push((i, j, dist[i][j]));
            }
            _ => missed.push(i),
        }
    }
    let false_alarms: Vec<usize> = (0..ys.len()).filter(|j| !y_matched[*j]).collect();
    let cost = pairs.iter().map(|(_, _, d)| d.powf(p)).sum::<f64>()
        + 0.5 * cp * (missed.len() + false_alarms.len()) as f64;
    StepAssignment {
        cost,
        pairs,
        missed,
        false_alarms,
    }
}

/// TGOSPA with `γ = 0`: independent GOSPA assignments per step. The switch
/// term is reported as zero.
pub fn gamma_zero<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    params: &TgospaParams,
    metric: &M,
) -> Result<TgospaResult> {
    params.validate()?;
    let steps = joint_steps(x, y);
    let mut columns = Vec::with_capacity(steps);
    for k in 0..steps {
        let (xi, xs): (Vec<usize>, Vec<&T>) = x
            .trajectories()
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.at(k).map(|v| (i, v)))
            .unzip();
        let (yj, ys): (Vec<usize>, Vec<&T>) = y
            .trajectories()
            .iter()
            .enumerate()
            .filter_map(|(j, t)| t.at(k).map(|v| (j, v)))
            .unzip();
        let step = gospa_step(&xs, &ys, params.p, params.c, metric);
        let mut column = vec![None; x.len()];
        for (a, b, _) in step.pairs {
            column[xi[a]] = Some(yj[b]);
        }
        columns.push(column);
    }
    let assignment = AssignmentMatrix::from_columns(x.len(), y.len(), columns)?;
    let parts = decompose(x, y, params, metric, &assignment, false);
    let mut result = TgospaResult::from_parts(params, parts, Some(assignment), true, Solver::GammaZero);
    result.gospa_limit = true;
    Ok(result)
}

/// TGOSPA in the limit `γ → ∞`: one assignment of whole trajectories, held
/// fixed over all steps. `params.gamma` is ignored.
pub fn gamma_extreme<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    params: &TgospaParams,
    metric: &M,
) -> Result<TgospaResult> {
    params.validate()?;
    let steps = joint_steps(x, y);
    let (p, c) = (params.p, params.c);
    let half_cp = params.half_cp();
    // Pairing i with j changes the cost by pair(i, j) - cᵖ/2 (|X_i| + |Y_j|).
    let gain: Vec<Vec<f64>> = x
        .trajectories()
        .iter()
        .map(|xi| {
            y.trajectories()
                .iter()
                .map(|yj| {
                    let lo = xi.start().min(yj.start());
                    let hi = xi.end().max(yj.end());
                    let pair: f64 = (lo..=hi)
                        .map(|k| base_distance(xi.at(k), yj.at(k), p, c, metric).powf(p))
                        .sum();
                    pair - half_cp * (xi.len() + yj.len()) as f64
                })
                .collect()
        })
        .collect();
    let sol = assignment::solve(x.len(), y.len(), |i, j| gain[i][j]);
    let row: Vec<Option<usize>> = sol
        .into_iter()
        .enumerate()
        .map(|(i, j)| j.filter(|&j| gain[i][j] < 0.0))
        .collect();
    let assignment = AssignmentMatrix::from_columns(x.len(), y.len(), vec![row; steps])?;
    let parts = decompose(x, y, params, metric, &assignment, true);
    Ok(TgospaResult::from_parts(params, parts, Some(assignment), true, Solver::GammaExtreme))
}
