//! Higher Order Tracking Accuracy (HOTA), implemented as a comparison
//! baseline for TGOSPA.
//!
//! For a threshold `α`, every frame is matched by maximising the match score
//! lexicographically: first the number of matches, then the best achievable
//! association score `A_max`, then the similarity. Pairs with similarity
//! `≤ α` cannot be matched. The score is
//! `HOTA_α = sqrt(Σ_TP A(c) / (|TP| + |FN| + |FP|))`, where `A(c)` is the
//! Jaccard index of the trajectory pair of the true positive `c`, and HOTA is
//! the mean over `α = 0.05, 0.10, …, 0.95`.

use serde::{Deserialize, Serialize};

use crate::assignment::{self, Lexicographic};
use crate::boxmetrics::{iou, BoundingBox};
use crate::trajectories::TrajectorySet;

/// Number of thresholds averaged by [`hota`].
pub const N_ALPHAS: usize = 19;

/// `α = 0.05·l` for `l = 1..=19`.
pub fn alphas() -> [f64; N_ALPHAS] {
    std::array::from_fn(|l| 0.05 * (l + 1) as f64)
}

/// Per-frame matchings for one threshold: `frames[k]` lists `(i, j)` pairs of
/// trajectory indices into `X` and `Y`.
pub type FrameMatches = Vec<Vec<(usize, usize)>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotaResult {
    pub overall: f64,
    pub per_alpha: [f64; N_ALPHAS],
    pub per_alpha_assignments: Vec<FrameMatches>,
}

/// HOTA at a single threshold, with the frame matchings it used.
pub fn hota_alpha_with_matches<T>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    alpha: f64,
    similarity: impl Fn(&T, &T) -> f64,
) -> (f64, FrameMatches) {
    let steps = x.steps().max(y.steps());
    let (n_x, n_y) = (x.len(), y.len());

    // Similarity per frame for co-existing pairs.
    let mut sims: Vec<Vec<(usize, usize, f64)>> = Vec::with_capacity(steps);
    let mut potential = vec![0usize; n_x * n_y];
    for k in 0..steps {
        let xs = x.column(k);
        let ys = y.column(k);
        let mut frame = Vec::new();
        for (i, a) in xs.iter().enumerate() {
            let Some(a) = a else { continue };
            for (j, b) in ys.iter().enumerate() {
                let Some(b) = b else { continue };
                let s = similarity(a, b);
                if s > alpha {
                    potential[i * n_y + j] += 1;
                    frame.push((i, j, s));
                }
            }
        }
        sims.push(frame);
    }
    let len_x: Vec<usize> = x.trajectories().iter().map(|t| t.len()).collect();
    let len_y: Vec<usize> = y.trajectories().iter().map(|t| t.len()).collect();
    let jaccard = |i: usize, j: usize, common: usize| {
        let union = len_x[i] + len_y[j] - common;
        common as f64 / union as f64
    };

    let mut tpa = vec![0usize; n_x * n_y];
    let mut matches = Vec::with_capacity(steps);
    let mut tp = 0usize;
    let mut detections = 0usize;
    for (k, frame) in sims.iter().enumerate() {
        let xi: Vec<usize> = (0..n_x).filter(|&i| x.trajectories()[i].at(k).is_some()).collect();
        let yj: Vec<usize> = (0..n_y).filter(|&j| y.trajectories()[j].at(k).is_some()).collect();
        detections += xi.len() + yj.len();
        let mut score = vec![Lexicographic([0.0; 3]); xi.len() * yj.len()];
        let mut allowed = vec![false; xi.len() * yj.len()];
        for &(i, j, s) in frame {
            let a = xi.binary_search(&i).unwrap();
            let b = yj.binary_search(&j).unwrap();
            score[a * yj.len() + b] = Lexicographic([-1.0, -jaccard(i, j, potential[i * n_y + j]), -s]);
            allowed[a * yj.len() + b] = true;
        }
        let sol = assignment::solve(xi.len(), yj.len(), |a, b| score[a * yj.len() + b]);
        let mut frame_matches = Vec::new();
        for (a, b) in sol.into_iter().enumerate() {
            if let Some(b) = b.filter(|&b| allowed[a * yj.len() + b]) {
                let (i, j) = (xi[a], yj[b]);
                tpa[i * n_y + j] += 1;
                frame_matches.push((i, j));
            }
        }
        tp += frame_matches.len();
        matches.push(frame_matches);
    }

    // |TP| + |FN| + |FP| = detections − |TP|, since each TP uses one of each.
    let denom = detections - tp;
    if denom == 0 {
        return (1.0, matches);
    }
    // Start from +0: an empty f64 sum is -0.
    let assoc: f64 = 0.0 + (0..n_x * n_y)
        .filter(|&ij| tpa[ij] > 0)
        .map(|ij| tpa[ij] as f64 * jaccard(ij / n_y, ij % n_y, tpa[ij]))
        .sum::<f64>();
    ((assoc / denom as f64).sqrt(), matches)
}

/// HOTA at threshold `α` with an arbitrary similarity in `[0, 1]`.
pub fn hota_alpha<T>(x: &TrajectorySet<T>, y: &TrajectorySet<T>, alpha: f64, similarity: impl Fn(&T, &T) -> f64) -> f64 {
    hota_alpha_with_matches(x, y, alpha, similarity).0
}

/// HOTA averaged over the 19 thresholds.
pub fn hota_with<T>(x: &TrajectorySet<T>, y: &TrajectorySet<T>, similarity: impl Fn(&T, &T) -> f64) -> HotaResult {
    let mut per_alpha = [0.0; N_ALPHAS];
    let mut per_alpha_assignments = Vec::with_capacity(N_ALPHAS);
    for (slot, alpha) in per_alpha.iter_mut().zip(alphas()) {
        let (score, matches) = hota_alpha_with_matches(x, y, alpha, &similarity);
        *slot = score;
        per_alpha_assignments.push(matches);
    }
    HotaResult {
        overall: per_alpha.iter().sum::<f64>() / N_ALPHAS as f64,
        per_alpha,
        per_alpha_assignments,
    }
}

/// HOTA of bounding-box trajectories with IoU similarity.
pub fn hota(x: &TrajectorySet<BoundingBox>, y: &TrajectorySet<BoundingBox>) -> HotaResult {
    hota_with(x, y, iou)
}

/// `1 − HOTA`, which is not a metric.
pub fn hota_dissimilarity<T>(x: &TrajectorySet<T>, y: &TrajectorySet<T>, similarity: impl Fn(&T, &T) -> f64) -> f64 {
    1.0 - hota_with(x, y, similarity).overall
}
