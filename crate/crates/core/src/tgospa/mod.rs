//! The trajectory GOSPA metric and its decomposition.
//!
//! Every solver returns a [`TgospaResult`] whose `p`-th power splits into
//! localization, missed, false and switch costs. Available solvers:
//!
//! * [`exact`]: dynamic programming over assignment columns, globally optimal
//!   for small instances;
//! * [`lp`]: the linear-programming relaxation, a lower bound that coincides
//!   with the metric when its optimum is integral;
//! * [`gamma_zero`] and [`gamma_extreme`]: the `γ = 0` and `γ → ∞` limits,
//!   both reducing to 2-D assignment problems.

pub mod exact;
pub mod fast;
pub mod lp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boxmetrics::Metric;
use crate::error::{Error, Result};
use crate::trajectories::{AssignmentMatrix, TrajectorySet};

pub use exact::{exact, ExactOptions, DEFAULT_STATE_CEILING};
pub use fast::{gamma_extreme, gamma_zero, gospa_step, StepAssignment};
pub use lp::{lp, LpOptions};

/// `(p, c, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TgospaParams {
    pub p: f64,
    pub c: f64,
    pub gamma: f64,
}

impl TgospaParams {
    pub fn new(p: f64, c: f64, gamma: f64) -> Result<Self> {
        let params = Self { p, c, gamma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::InvalidParams(format!("p must be finite and >= 1, got {}", self.p)));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParams(format!("c must be finite and > 0, got {}", self.c)));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// `γ = 0`: a per-step GOSPA aggregate, not a metric on trajectory sets.
    pub fn is_gospa_limit(&self) -> bool {
        self.gamma == 0.0
    }

    /// `cᵖ / 2`, the price of one missed or false instance.
    pub fn half_cp(&self) -> f64 {
        0.5 * self.c.powf(self.p)
    }

    pub fn gamma_p(&self) -> f64 {
        self.gamma.powf(self.p)
    }
}

/// Which algorithm produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Auto,
    Exact,
    Lp,
    GammaZero,
    GammaExtreme,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Auto => "auto",
            Solver::Exact => "exact",
            Solver::Lp => "lp",
            Solver::GammaZero => "gamma-zero",
            Solver::GammaExtreme => "gamma-extreme",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Solver::Auto),
            "exact" => Ok(Solver::Exact),
            "lp" => Ok(Solver::Lp),
            "gamma-zero" => Ok(Solver::GammaZero),
            "gamma-extreme" => Ok(Solver::GammaExtreme),
            other => Err(Error::InvalidParams(format!("unknown solver '{other}'"))),
        }
    }
}

/// Costs attributed to one time step. Switch costs are booked on the step
/// the assignment changes into.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepCosts {
    pub loc_cost: f64,
    pub miss_cost: f64,
    pub false_cost: f64,
    pub switch_cost: f64,
}

/// Metric value with its four-term decomposition.
///
/// Counts are `f64` because a fractional LP optimum yields fractional counts;
/// for hard results they are integers (half-integers for `n_switches`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TgospaResult {
    pub total: f64,
    pub loc_cost: f64,
    pub miss_cost: f64,
    pub false_cost: f64,
    pub switch_cost: f64,
    pub n_proper: f64,
    pub n_missed: f64,
    pub n_false: f64,
    pub n_switches: f64,
    /// `p`-average localization error of the properly estimated instances.
    pub p_avg_loc: f64,
    /// Optimal assignment; `None` when the LP optimum is fractional.
    pub assignment: Option<AssignmentMatrix>,
    /// False only for fractional LP optima.
    pub is_hard: bool,
    /// Set when `γ = 0`: the value is a GOSPA aggregate over steps.
    pub gospa_limit: bool,
    pub solver: Solver,
    pub per_step: Vec<StepCosts>,
}

impl TgospaResult {
    /// `loc + miss + false + switch`, i.e. `totalᵖ`.
    pub fn cost_sum(&self) -> f64 {
        self.loc_cost + self.miss_cost + self.false_cost + self.switch_cost
    }

    pub(crate) fn from_parts(
        params: &TgospaParams,
        parts: Parts,
        assignment: Option<AssignmentMatrix>,
        is_hard: bool,
        solver: Solver,
    ) -> Self {
        let p = params.p;
        let half_cp = params.half_cp();
        let loc_cost: f64 = parts.per_step.iter().map(|s| s.loc_cost).sum();
        let miss_cost = half_cp * parts.n_missed;
        let false_cost = half_cp * parts.n_false;
        let switch_cost = params.gamma_p() * parts.n_switches;
        let sum = loc_cost + miss_cost + false_cost + switch_cost;
        let p_avg_loc = if parts.n_proper > 0.0 {
            (loc_cost / parts.n_proper).powf(1.0 / p)
        } else {
            0.0
        };
        Self {
            total: sum.max(0.0).powf(1.0 / p),
            loc_cost,
            miss_cost,
            false_cost,
            switch_cost,
            n_proper: parts.n_proper,
            n_missed: parts.n_missed,
            n_false: parts.n_false,
            n_switches: parts.n_switches,
            p_avg_loc,
            assignment,
            is_hard,
            gospa_limit: params.is_gospa_limit(),
            solver,
            per_step: parts.per_step,
        }
    }
}

/// Raw decomposition counts before weighting.
#[derive(Debug, Clone, Default)]
pub(crate) struct Parts {
    pub n_proper: f64,
    pub n_missed: f64,
    pub n_false: f64,
    pub n_switches: f64,
    pub per_step: Vec<StepCosts>,
}

/// Distance between two sets holding at most one instance each.
pub fn base_distance<T, M: Metric<T> + ?Sized>(
    x: Option<&T>,
    y: Option<&T>,
    p: f64,
    c: f64,
    metric: &M,
) -> f64 {
    match (x, y) {
        (Some(a), Some(b)) => metric.distance(a, b).min(c),
        (None, None) => 0.0,
        _ => c / 2f64.powf(1.0 / p),
    }
}

/// Switch count between consecutive assignments of one row: 0, ½ or 1.
pub fn switch_cost(prev: Option<usize>, next: Option<usize>) -> f64 {
    f64::from(switch_halves(prev, next)) * 0.5
}

/// Switch count in half-switch units.
pub(crate) fn switch_halves(prev: Option<usize>, next: Option<usize>) -> u32 {
    match (prev, next) {
        (a, b) if a == b => 0,
        (Some(_), Some(_)) => 2,
        _ => 1,
    }
}

/// Decomposes the cost of a fixed assignment.
///
/// When `count_switches` is false the switch term is left at zero, which is
/// how the `γ = 0` limit reports its per-step matchings.
pub fn evaluate_assignment<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    params: &TgospaParams,
    metric: &M,
    assignment: &AssignmentMatrix,
    count_switches: bool,
    solver: Solver,
) -> TgospaResult {
    let parts = decompose(x, y, params, metric, assignment, count_switches);
    TgospaResult::from_parts(params, parts, Some(assignment.clone()), true, solver)
}

pub(crate) fn decompose<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    params: &TgospaParams,
    metric: &M,
    assignment: &AssignmentMatrix,
    count_switches: bool,
) -> Parts {
    let steps = assignment.steps();
    let half_cp = params.half_cp();
    let gamma_p = params.gamma_p();
    let mut parts = Parts {
        per_step: vec![StepCosts::default(); steps],
        ..Parts::default()
    };
    let mut y_matched = vec![false; y.len()];
    for k in 0..steps {
        let column = assignment.column(k);
        y_matched.iter_mut().for_each(|m| *m = false);
        let mut step = StepCosts::default();
        let (mut proper, mut missed, mut false_) = (0usize, 0usize, 0usize);
        for (i, xi) in x.trajectories().iter().enumerate() {
            let Some(a) = xi.at(k) else { continue };
            let matched = column[i].and_then(|j| {
                let b = y.trajectories()[j].at(k)?;
                let d = metric.distance(a, b);
                (d < params.c).then_some((j, d))
            });
            match matched {
                Some((j, d)) => {
                    y_matched[j] = true;
                    proper += 1;
                    step.loc_cost += d.powf(params.p);
                }
                None => missed += 1,
            }
        }
        for (j, yj) in y.trajectories().iter().enumerate() {
            if yj.at(k).is_some() && !y_matched[j] {
                false_ += 1;
            }
        }
        step.miss_cost = half_cp * missed as f64;
        step.false_cost = half_cp * false_ as f64;
        if count_switches && k > 0 {
            let prev = assignment.column(k - 1);
            let halves: u32 = prev.iter().zip(column).map(|(a, b)| switch_halves(*a, *b)).sum();
            parts.n_switches += 0.5 * f64::from(halves);
            step.switch_cost = gamma_p * 0.5 * f64::from(halves);
        }
        parts.n_proper += proper as f64;
        parts.n_missed += missed as f64;
        parts.n_false += false_ as f64;
        parts.per_step[k] = step;
    }
    parts
}

/// Solver options shared by the dispatcher.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub exact: ExactOptions,
    pub lp: LpOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            exact: ExactOptions::default(),
            lp: LpOptions::default(),
        }
    }
}

/// Runs the requested solver. `Auto` picks the `γ = 0` path when `γ = 0`,
/// the exact solver when the instance fits its ceiling, and the LP otherwise.
pub fn evaluate<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    params: &TgospaParams,
    metric: &M,
    solver: Solver,
    options: &EvalOptions,
) -> Result<TgospaResult> {
    params.validate()?;
    match solver {
        Solver::Auto => {
            if params.is_gospa_limit() {
                gamma_zero(x, y, params, metric)
            } else if exact::fits(x, y, &options.exact) {
                exact(x, y, params, metric, &options.exact)
            } else {
                lp(x, y, params, metric, &options.lp)
            }
        }
        Solver::Exact => exact(x, y, params, metric, &options.exact),
        Solver::Lp => lp(x, y, params, metric, &options.lp),
        Solver::GammaZero => gamma_zero(x, y, params, metric),
        Solver::GammaExtreme => gamma_extreme(x, y, params, metric),
    }
}

/// Number of time steps spanned by both sets.
pub(crate) fn joint_steps<T>(x: &TrajectorySet<T>, y: &TrajectorySet<T>) -> usize {
    x.horizon().max(y.horizon()) + 1
}

/// Per-step, per-pair cost tables shared by the exact and LP solvers.
pub(crate) struct StepTables {
    /// `pair[i * n_y + j]`: `base_distance(x_i, y_j)ᵖ`.
    pub pair: Vec<f64>,
    pub x_present: Vec<bool>,
    pub y_present: Vec<bool>,
}

pub(crate) fn step_tables<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    k: usize,
    params: &TgospaParams,
    metric: &M,
) -> StepTables {
    let xs = x.column(k);
    let ys = y.column(k);
    let mut pair = Vec::with_capacity(xs.len() * ys.len());
    for a in &xs {
        for b in &ys {
            pair.push(base_distance(*a, *b, params.p, params.c, metric).powf(params.p));
        }
    }
    StepTables {
        pair,
        x_present: xs.iter().map(Option::is_some).collect(),
        y_present: ys.iter().map(Option::is_some).collect(),
    }
}
