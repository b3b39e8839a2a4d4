//! Trajectory GOSPA (TGOSPA) and HOTA for evaluating multi-object trackers.
//!
//! The crate is generic over the instance type: anything with a [`Metric`]
//! works, and bounding boxes with the IoU, Hausdorff and Wasserstein
//! distances are provided.

pub mod assignment;
pub mod boxmetrics;
pub mod error;
pub mod hota;
pub mod motio;
pub mod paramselect;
pub mod tgospa;
pub mod trajectories;

pub use boxmetrics::{BoundingBox, BoxMetric, Euclidean, Metric};
pub use error::{Error, Result};
pub use tgospa::{evaluate, EvalOptions, Solver, TgospaParams, TgospaResult};
pub use trajectories::{AssignmentMatrix, Segment, Trajectory, TrajectorySet};
