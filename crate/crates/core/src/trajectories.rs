//! Sets of discrete-time trajectories and per-step assignment matrices.
//!
//! A trajectory is a list of segments, each a start step plus a run of
//! consecutive instances. Trajectories are identified by their position in a
//! [`TrajectorySet`]; external ids are a concern of the ingestion layer.

use serde::{Deserialize, Serialize};

use crate::boxmetrics::Metric;
use crate::error::{Error, Result};

/// Consecutive instances starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub start: usize,
    pub instances: Vec<T>,
}

impl<T> Segment<T> {
    /// Last step covered by the segment (inclusive).
    pub fn end(&self) -> usize {
        self.start + self.instances.len() - 1
    }
}

/// A trajectory with at most one instance per time step and possible gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    segments: Vec<Segment<T>>,
}

impl<T> Trajectory<T> {
    /// A gap-free trajectory starting at `start`.
    pub fn single(start: usize, instances: Vec<T>) -> Result<Self> {
        Self::from_segments(vec![(start, instances)])
    }

    /// Builds a trajectory from `(start, instances)` segments. Segments must
    /// be non-empty and strictly ordered in time; touching segments are
    /// merged.
    pub fn from_segments(segments: Vec<(usize, Vec<T>)>) -> Result<Self> {
        let mut out: Vec<Segment<T>> = Vec::with_capacity(segments.len());
        for (start, instances) in segments {
            if instances.is_empty() {
                return Err(Error::InvalidTrajectory(format!("empty segment at step {start}")));
            }
            match out.last_mut() {
                Some(prev) if start <= prev.end() => {
                    return Err(Error::InvalidTrajectory(format!(
                        "segment starting at {start} overlaps or precedes segment ending at {}",
                        prev.end()
                    )));
                }
                Some(prev) if start == prev.end() + 1 => prev.instances.extend(instances),
                _ => out.push(Segment { start, instances }),
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidTrajectory("trajectory without instances".into()));
        }
        Ok(Self { segments: out })
    }

    /// Builds a trajectory from `(step, instance)` pairs in any order.
    pub fn from_instances(pairs: impl IntoIterator<Item = (usize, T)>) -> Result<Self> {
        let mut pairs: Vec<(usize, T)> = pairs.into_iter().collect();
        pairs.sort_by_key(|(k, _)| *k);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidTrajectory(format!(
                "two instances at time step {}",
                w[0].0
            )));
        }
        let mut segments: Vec<(usize, Vec<T>)> = Vec::new();
        for (k, x) in pairs {
            match segments.last_mut() {
                Some((start, xs)) if *start + xs.len() == k => xs.push(x),
                _ => segments.push((k, vec![x])),
            }
        }
        Self::from_segments(segments)
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn start(&self) -> usize {
        self.segments[0].start
    }

    /// Last step with an instance (inclusive).
    pub fn end(&self) -> usize {
        self.segments[self.segments.len() - 1].end()
    }

    /// Number of instances.
    pub fn len(&self) -> usize {
        self.segments.iter().map(|s| s.instances.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The instance at step `k`, if any.
    pub fn at(&self, k: usize) -> Option<&T> {
        let idx = self.segments.partition_point(|s| s.start <= k);
        if idx == 0 {
            return None;
        }
        let seg = &self.segments[idx - 1];
        seg.instances.get(k - seg.start)
    }

    /// `(step, instance)` pairs in time order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &T)> + '_ {
        self.segments
            .iter()
            .flat_map(|s| s.instances.iter().enumerate().map(move |(o, x)| (s.start + o, x)))
    }

    /// Applies `f` to every instance, keeping the time structure.
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Trajectory<U> {
        Trajectory {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    start: s.start,
                    instances: s.instances.iter().map(&mut f).collect(),
                })
                .collect(),
        }
    }
}

/// A finite set of trajectories over the steps `0..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySet<T> {
    trajectories: Vec<Trajectory<T>>,
    horizon: usize,
}

impl<T> TrajectorySet<T> {
    pub fn new(trajectories: Vec<Trajectory<T>>, horizon: usize) -> Result<Self> {
        if let Some(t) = trajectories.iter().find(|t| t.end() > horizon) {
            return Err(Error::OutOfHorizon {
                step: t.end(),
                horizon,
            });
        }
        Ok(Self {
            trajectories,
            horizon,
        })
    }

    /// Uses the latest instance step as the horizon (0 for an empty set).
    pub fn with_tight_horizon(trajectories: Vec<Trajectory<T>>) -> Self {
        let horizon = trajectories.iter().map(|t| t.end()).max().unwrap_or(0);
        Self {
            trajectories,
            horizon,
        }
    }

    pub fn empty(horizon: usize) -> Self {
        Self {
            trajectories: Vec::new(),
            horizon,
        }
    }

    /// Final time step `K`.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of time steps, `K + 1`.
    pub fn steps(&self) -> usize {
        self.horizon + 1
    }

    /// Returns a copy with a larger horizon. Shrinking is rejected if it would
    /// cut off instances.
    pub fn with_horizon(mut self, horizon: usize) -> Result<Self> {
        if let Some(t) = self.trajectories.iter().find(|t| t.end() > horizon) {
            return Err(Error::OutOfHorizon {
                step: t.end(),
                horizon,
            });
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn trajectories(&self) -> &[Trajectory<T>] {
        &self.trajectories
    }

    pub fn get(&self, i: usize) -> Option<&Trajectory<T>> {
        self.trajectories.get(i)
    }

    /// Total number of instances over all trajectories.
    pub fn instance_count(&self) -> usize {
        self.trajectories.iter().map(Trajectory::len).sum()
    }

    /// Instances present at step `k`, in trajectory order.
    pub fn tau(&self, k: usize) -> Result<Vec<&T>> {
        self.check_step(k)?;
        Ok(self.trajectories.iter().filter_map(|t| t.at(k)).collect())
    }

    /// Per-trajectory view of step `k`: `None` where a trajectory is absent.
    pub fn column(&self, k: usize) -> Vec<Option<&T>> {
        self.trajectories.iter().map(|t| t.at(k)).collect()
    }

    fn check_step(&self, k: usize) -> Result<()> {
        if k > self.horizon {
            Err(Error::OutOfHorizon {
                step: k,
                horizon: self.horizon,
            })
        } else {
            Ok(())
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> TrajectorySet<U> {
        TrajectorySet {
            trajectories: self.trajectories.iter().map(|t| t.map(&mut f)).collect(),
            horizon: self.horizon,
        }
    }
}

/// `τᵏ` for a single trajectory, with the horizon check of the owning set.
pub fn tau_k<T>(trajectory: &Trajectory<T>, k: usize) -> Option<&T> {
    trajectory.at(k)
}

/// Pairs `(i, j)` assigned by one column of an assignment matrix.
pub fn rho(column: &[Option<usize>]) -> Vec<(usize, usize)> {
    column
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j)))
        .collect()
}

/// Assigned pairs at step `k` where both instances exist and lie strictly
/// closer than the cut-off `c`.
pub fn theta_k<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    k: usize,
    column: &[Option<usize>],
    c: f64,
    metric: &M,
) -> Vec<(usize, usize)> {
    rho(column)
        .into_iter()
        .filter(|&(i, j)| {
            match (
                x.get(i).and_then(|t| t.at(k)),
                y.get(j).and_then(|t| t.at(k)),
            ) {
                (Some(a), Some(b)) => metric.distance(a, b) < c,
                _ => false,
            }
        })
        .collect()
}

/// Trajectory-to-trajectory assignment for every step: `columns[k][i]` is the
/// index of the trajectory in `Y` assigned to `X_i` at step `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentMatrix {
    n_x: usize,
    n_y: usize,
    columns: Vec<Vec<Option<usize>>>,
}

impl AssignmentMatrix {
    /// All-unassigned matrix.
    pub fn unassigned(n_x: usize, n_y: usize, steps: usize) -> Self {
        Self {
            n_x,
            n_y,
            columns: vec![vec![None; n_x]; steps],
        }
    }

    pub fn from_columns(n_x: usize, n_y: usize, columns: Vec<Vec<Option<usize>>>) -> Result<Self> {
        for (k, col) in columns.iter().enumerate() {
            validate_column(col, n_x, n_y).map_err(|m| Error::Domain(format!("step {k}: {m}")))?;
        }
        Ok(Self { n_x, n_y, columns })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn steps(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[Option<usize>] {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[Vec<Option<usize>>] {
        &self.columns
    }

    pub fn get(&self, i: usize, k: usize) -> Option<usize> {
        self.columns[k][i]
    }

    /// Row `i` over all steps.
    pub fn row(&self, i: usize) -> Vec<Option<usize>> {
        self.columns.iter().map(|c| c[i]).collect()
    }
}

pub(crate) fn validate_column(
    col: &[Option<usize>],
    n_x: usize,
    n_y: usize,
) -> std::result::Result<(), String> {
    if col.len() != n_x {
        return Err(format!("column has {} rows, expected {n_x}", col.len()));
    }
    let mut used = vec![false; n_y];
    for j in col.iter().flatten() {
        if *j >= n_y {
            return Err(format!("index {j} out of range for {n_y} trajectories"));
        }
        if std::mem::replace(&mut used[*j], true) {
            return Err(format!("trajectory {j} assigned twice"));
        }
    }
    Ok(())
}
