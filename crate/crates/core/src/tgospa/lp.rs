//! Linear-programming relaxation of TGOSPA.
//!
//! Per step `k` the variables form a matrix `Wᵏ` of size `(|X|+1) × (|Y|+1)`
//! whose last row and column are the unassigned slots. Real rows and real
//! columns sum to one. Temporal changes of the real block are penalised by
//! `γᵖ/2 · |Wᵏ⁺¹(i,j) − Wᵏ(i,j)|`, encoded with one auxiliary variable and two
//! inequalities per entry. The optimum is a lower bound on TGOSPA and equals
//! it whenever the optimal `W` is integral.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::boxmetrics::Metric;
use crate::error::{Error, Result};
use crate::trajectories::{AssignmentMatrix, TrajectorySet};

use super::{
    decompose, joint_steps, step_tables, Parts, Solver, StepCosts, TgospaParams, TgospaResult,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    /// Distance from {0, 1} under which a variable counts as integral.
    pub integrality_tol: f64,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            integrality_tol: 1e-6,
        }
    }
}

/// TGOSPA via its LP relaxation. Requires `γ > 0`.
pub fn lp<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    params: &TgospaParams,
    metric: &M,
    options: &LpOptions,
) -> Result<TgospaResult> {
    params.validate()?;
    if params.gamma <= 0.0 {
        return Err(Error::InvalidParams(
            "the LP solver requires gamma > 0; use the gamma-zero solver".into(),
        ));
    }
    let steps = joint_steps(x, y);
    let (n_x, n_y) = (x.len(), y.len());
    let half_cp = params.half_cp();
    let half_gamma_p = 0.5 * params.gamma_p();

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let tables: Vec<_> = (0..steps).map(|k| step_tables(x, y, k, params, metric)).collect();

    // w[k][i][j], i in 0..=n_x, j in 0..=n_y, (n_x, n_y) unused
    let mut w = Vec::with_capacity(steps);
    for t in &tables {
        let mut wk = vec![vec![None; n_y + 1]; n_x + 1];
        for i in 0..=n_x {
            for j in 0..=n_y {
                let cost = match (i < n_x, j < n_y) {
                    (true, true) => t.pair[i * n_y + j],
                    (true, false) => {
                        if t.x_present[i] {
                            half_cp
                        } else {
                            0.0
                        }
                    }
                    (false, true) => {
                        if t.y_present[j] {
                            half_cp
                        } else {
                            0.0
                        }
                    }
                    (false, false) => continue,
                };
                wk[i][j] = Some(problem.add_var(cost, (0.0, 1.0)));
            }
        }
        for row in wk.iter().take(n_x) {
            let terms: Vec<_> = row.iter().flatten().map(|v| (*v, 1.0)).collect();
            problem.add_constraint(terms.as_slice(), ComparisonOp::Eq, 1.0);
        }
        for j in 0..n_y {
            let terms: Vec<_> = wk.iter().filter_map(|row| row[j]).map(|v| (v, 1.0)).collect();
            problem.add_constraint(terms.as_slice(), ComparisonOp::Eq, 1.0);
        }
        w.push(wk);
    }
    let mut switch_vars = Vec::new();
    for k in 0..steps.saturating_sub(1) {
        for i in 0..n_x {
            for j in 0..n_y {
                let (a, b) = (w[k][i][j].unwrap(), w[k + 1][i][j].unwrap());
                let e = problem.add_var(half_gamma_p, (0.0, f64::INFINITY));
                problem.add_constraint([(e, 1.0), (b, -1.0), (a, 1.0)].as_slice(), ComparisonOp::Ge, 0.0);
                problem.add_constraint([(e, 1.0), (b, 1.0), (a, -1.0)].as_slice(), ComparisonOp::Ge, 0.0);
                switch_vars.push((k + 1, e));
            }
        }
    }

    let solution = problem
        .solve()
        .map_err(|e| Error::Solver(format!("{e:?}")))?
        .into_solution()
        .map_err(|_| Error::Solver("LP solve interrupted before a solution was found".into()))?;

    let value = |v| solution.var_value(v).clamp(0.0, 1.0);
    let tol = options.integrality_tol;
    let is_hard = w
        .iter()
        .flatten()
        .flatten()
        .flatten()
        .all(|v| {
            let z = value(*v);
            z < tol || z > 1.0 - tol
        });

    if is_hard {
        let columns = w
            .iter()
            .map(|wk| {
                (0..n_x)
                    .map(|i| (0..n_y).find(|&j| value(wk[i][j].unwrap()) > 0.5))
                    .collect()
            })
            .collect();
        let assignment = AssignmentMatrix::from_columns(n_x, n_y, columns)
            .map_err(|e| Error::Solver(format!("rounded LP solution is not an assignment: {e}")))?;
        let parts = decompose(x, y, params, metric, &assignment, true);
        return Ok(TgospaResult::from_parts(params, parts, Some(assignment), true, Solver::Lp));
    }

    // Fractional optimum: report the decomposition of the soft assignment.
    let mut parts = Parts {
        per_step: vec![StepCosts::default(); steps],
        ..Parts::default()
    };
    for (k, (t, wk)) in tables.iter().zip(&w).enumerate() {
        let xs = x.column(k);
        let ys = y.column(k);
        let mut eligible = vec![vec![0.0; n_y]; n_x];
        let mut loc = 0.0;
        for i in 0..n_x {
            for j in 0..n_y {
                if let (Some(a), Some(b)) = (xs[i], ys[j]) {
                    let d = metric.distance(a, b);
                    if d < params.c {
                        let z = value(wk[i][j].unwrap());
                        eligible[i][j] = z;
                        loc += z * t.pair[i * n_y + j];
                    }
                }
            }
        }
        let proper: f64 = eligible.iter().flatten().sum();
        let missed: f64 = (0..n_x)
            .filter(|&i| t.x_present[i])
            .map(|i| (1.0 - eligible[i].iter().sum::<f64>()).max(0.0))
            .sum();
        let false_: f64 = (0..n_y)
            .filter(|&j| t.y_present[j])
            .map(|j| (1.0 - eligible.iter().map(|r| r[j]).sum::<f64>()).max(0.0))
            .sum();
        parts.n_proper += proper;
        parts.n_missed += missed;
        parts.n_false += false_;
        parts.per_step[k].loc_cost = loc;
        parts.per_step[k].miss_cost = half_cp * missed;
        parts.per_step[k].false_cost = half_cp * false_;
    }
    for (k, e) in switch_vars {
        let amount = solution.var_value(e).max(0.0);
        parts.n_switches += 0.5 * amount;
        parts.per_step[k].switch_cost += half_gamma_p * amount;
    }
    Ok(TgospaResult::from_parts(params, parts, None, false, Solver::Lp))
}
