//! Exact TGOSPA by dynamic programming over assignment columns.
//!
//! The metric is a shortest path through the space of injective columns: each
//! step adds the assigned/unassigned cost of its column, each transition adds
//! `γᵖ` times the switch count. The minimum over predecessors is computed in
//! two relaxation sweeps (unassign rows, then assign rows), using the fact
//! that a full switch costs exactly the same as unassigning and reassigning.
//!
//! Ties are broken toward fewer switches, then toward the lexicographically
//! smallest assignment (earliest step first, `None` before `Some`).

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::boxmetrics::Metric;
use crate::error::{Error, Result};
use crate::trajectories::{AssignmentMatrix, TrajectorySet};

use super::{decompose, joint_steps, step_tables, Solver, TgospaParams, TgospaResult};

/// Default ceiling on `states × steps`.
pub const DEFAULT_STATE_CEILING: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOptions {
    /// Maximum admissible `states × steps`.
    pub ceiling: u128,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            ceiling: DEFAULT_STATE_CEILING,
        }
    }
}

/// Number of injective partial maps from `n_x` rows into `n_y` columns.
pub fn column_count(n_x: usize, n_y: usize) -> u128 {
    // sum over r of C(n_x, r) * n_y! / (n_y - r)!
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    let mut perm: u128 = 1;
    for r in 0..=n_x.min(n_y) {
        if r > 0 {
            binom = binom.saturating_mul((n_x - r + 1) as u128) / r as u128;
            perm = perm.saturating_mul((n_y - r + 1) as u128);
        }
        total = total.saturating_add(binom.saturating_mul(perm));
    }
    total
}

/// `states × steps` for an instance.
pub fn work<T>(x: &TrajectorySet<T>, y: &TrajectorySet<T>) -> u128 {
    column_count(x.len(), y.len()).saturating_mul(joint_steps(x, y) as u128)
}

pub fn fits<T>(x: &TrajectorySet<T>, y: &TrajectorySet<T>, options: &ExactOptions) -> bool {
    work(x, y) <= options.ceiling
}

/// Path cost with its half-switch count, compared with a relative tolerance
/// on the cost so that float noise does not decide ties.
#[derive(Debug, Clone, Copy)]
struct Key {
    cost: f64,
    halves: u64,
}

impl Key {
    fn add(self, cost: f64, halves: u64) -> Self {
        Self {
            cost: self.cost + cost,
            halves: self.halves + halves,
        }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        let tol = 1e-10 * (1.0 + self.cost.abs().max(other.cost.abs()));
        if (self.cost - other.cost).abs() > tol {
            self.cost.total_cmp(&other.cost)
        } else {
            self.halves.cmp(&other.halves)
        }
    }

    fn better(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Less
    }
}

struct ColumnSpace {
    columns: Vec<Vec<Option<usize>>>,
    index: HashMap<Vec<Option<usize>>, usize>,
    /// Assigned-row count per column.
    size: Vec<usize>,
    n_y: usize,
}

impl ColumnSpace {
    fn new(n_x: usize, n_y: usize) -> Self {
        let mut columns = Vec::new();
        let mut current = vec![None; n_x];
        let mut used = vec![false; n_y];
        enumerate(0, &mut current, &mut used, &mut columns);
        let index = columns.iter().enumerate().map(|(s, c)| (c.clone(), s)).collect();
        let size = columns.iter().map(|c| c.iter().flatten().count()).collect();
        Self {
            columns,
            index,
            size,
            n_y,
        }
    }

    fn len(&self) -> usize {
        self.columns.len()
    }

    /// Columns obtained by assigning one currently unassigned row.
    fn extensions(&self, s: usize, mut f: impl FnMut(usize)) {
        let col = &self.columns[s];
        let mut used = vec![false; self.n_y];
        col.iter().flatten().for_each(|j| used[*j] = true);
        let mut probe = col.clone();
        for i in 0..col.len() {
            if col[i].is_some() {
                continue;
            }
            for (j, taken) in used.iter().enumerate() {
                if *taken {
                    continue;
                }
                probe[i] = Some(j);
                f(self.index[&probe]);
            }
            probe[i] = None;
        }
    }

    /// Columns obtained by unassigning one row.
    fn reductions(&self, s: usize, mut f: impl FnMut(usize)) {
        let mut probe = self.columns[s].clone();
        for i in 0..probe.len() {
            if let Some(j) = probe[i] {
                probe[i] = None;
                f(self.index[&probe]);
                probe[i] = Some(j);
            }
        }
    }
}

/// Lexicographic enumeration: `None` first, then ascending indices.
fn enumerate(
    row: usize,
    current: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<Option<usize>>>,
) {
    if row == current.len() {
        out.push(current.clone());
        return;
    }
    current[row] = None;
    enumerate(row + 1, current, used, out);
    for j in 0..used.len() {
        if !used[j] {
            used[j] = true;
            current[row] = Some(j);
            enumerate(row + 1, current, used, out);
            used[j] = false;
        }
    }
    current[row] = None;
}

fn column_cost(col: &[Option<usize>], tables: &super::StepTables, half_cp: f64, n_y: usize) -> f64 {
    let mut cost = 0.0;
    let mut y_present_used = 0usize;
    for (i, slot) in col.iter().enumerate() {
        match slot {
            Some(j) => {
                cost += tables.pair[i * n_y + j];
                if tables.y_present[*j] {
                    y_present_used += 1;
                }
            }
            None if tables.x_present[i] => cost += half_cp,
            None => {}
        }
    }
    let y_present = tables.y_present.iter().filter(|p| **p).count();
    cost + half_cp * (y_present - y_present_used) as f64
}

/// `min_b sw(a, b) + value(b)` for every `a`, with switches weighted by
/// `gamma_p` per full switch.
fn relax(space: &ColumnSpace, value: &[Key], half_gamma_p: f64) -> Vec<Key> {
    let n = space.len();
    let mut order: Vec<usize> = (0..n).collect();
    // unassign sweep: minimum over supersets, largest columns first
    order.sort_by_key(|&s| std::cmp::Reverse(space.size[s]));
    let mut down = value.to_vec();
    for &s in &order {
        let mut best = down[s];
        space.extensions(s, |t| {
            let cand = down[t].add(half_gamma_p, 1);
            if cand.better(&best) {
                best = cand;
            }
        });
        down[s] = best;
    }
    // assign sweep: minimum over subsets, smallest columns first
    order.reverse();
    let mut up = down;
    for &s in &order {
        let mut best = up[s];
        space.reductions(s, |t| {
            let cand = up[t].add(half_gamma_p, 1);
            if cand.better(&best) {
                best = cand;
            }
        });
        up[s] = best;
    }
    up
}

/// Globally optimal TGOSPA by exhaustive dynamic programming.
pub fn exact<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    params: &TgospaParams,
    metric: &M,
    options: &ExactOptions,
) -> Result<TgospaResult> {
    params.validate()?;
    let w = work(x, y);
    if w > options.ceiling {
        return Err(Error::TooLarge {
            work: w,
            ceiling: options.ceiling,
        });
    }
    let steps = joint_steps(x, y);
    let (n_x, n_y) = (x.len(), y.len());
    let space = ColumnSpace::new(n_x, n_y);
    let half_cp = params.half_cp();
    let half_gamma_p = 0.5 * params.gamma_p();

    let step_cost: Vec<Vec<f64>> = (0..steps)
        .map(|k| {
            let tables = step_tables(x, y, k, params, metric);
            space
                .columns
                .iter()
                .map(|col| column_cost(col, &tables, half_cp, n_y))
                .collect()
        })
        .collect();

    // value[k][s]: best cost from step k to the end when step k uses column s
    let mut value: Vec<Vec<Key>> = vec![Vec::new(); steps];
    value[steps - 1] = step_cost[steps - 1]
        .iter()
        .map(|&c| Key { cost: c, halves: 0 })
        .collect();
    for k in (0..steps - 1).rev() {
        let ahead = relax(&space, &value[k + 1], half_gamma_p);
        value[k] = ahead
            .iter()
            .zip(&step_cost[k])
            .map(|(key, c)| key.add(*c, 0))
            .collect();
    }

    // forward reconstruction with lexicographic tie-breaking
    let mut chosen = Vec::with_capacity(steps);
    let mut current = first_best(value[0].iter().copied());
    chosen.push(space.columns[current].clone());
    for k in 1..steps {
        let prev = &space.columns[current];
        current = first_best(space.columns.iter().zip(&value[k]).map(|(col, key)| {
            let halves: u32 = prev
                .iter()
                .zip(col)
                .map(|(a, b)| super::switch_halves(*a, *b))
                .sum();
            key.add(half_gamma_p * f64::from(halves), u64::from(halves))
        }));
        chosen.push(space.columns[current].clone());
    }

    let assignment = AssignmentMatrix::from_columns(n_x, n_y, chosen)?;
    let parts = decompose(x, y, params, metric, &assignment, true);
    Ok(TgospaResult::from_parts(params, parts, Some(assignment), true, Solver::Exact))
}

/// Index of the first key tied with the minimum.
fn first_best(mut keys: impl Iterator<Item = Key> + Clone) -> usize {
    let best = keys
        .clone()
        .reduce(|a, b| if b.better(&a) { b } else { a })
        .expect("column space is never empty");
    keys.position(|k| k.cmp(&best) == Ordering::Equal).unwrap_or(0)
}
