//! Choosing TGOSPA parameters.
//!
//! * `γ` from the largest distance `g₁` at which a short-term switch is still
//!   preferred over a brief localization error, or from the number `n` of
//!   steps a wrong assignment must persist before a switch pays off.
//! * `p` from the distance `a` at which a localization error costs as much as
//!   a missed plus a false instance.
//! * Histogram guidelines for choosing `c` from observed assignment
//!   distances.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boxmetrics::Metric;
use crate::error::{Error, Result};
use crate::tgospa::gospa_step;
use crate::trajectories::TrajectorySet;

/// Default histogram bin width for IoU distances on `[0, 1]`.
pub const DEFAULT_BIN_WIDTH: f64 = 0.005;

fn check_cp(c: f64, p: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("c must be positive and finite, got {c}")));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::Domain(format!("p must be finite and at least 1, got {p}")));
    }
    Ok(())
}

/// `γ = ((cᵖ − g₁ᵖ)/2)^(1/p)` for `0 < g₁ < c`.
pub fn gamma_from_g1(c: f64, p: f64, g1: f64) -> Result<f64> {
    check_cp(c, p)?;
    if !(g1 > 0.0 && g1 < c) {
        return Err(Error::Domain(format!("g1 must lie in (0, c) = (0, {c}), got {g1}")));
    }
    Ok(((c.powf(p) - g1.powf(p)) / 2.0).powf(1.0 / p))
}

/// Inverse of [`gamma_from_g1`]: `g₁ = (cᵖ − 2γᵖ)^(1/p)`.
pub fn g1_from_gamma(c: f64, p: f64, gamma: f64) -> Result<f64> {
    check_cp(c, p)?;
    let limit = c / 2f64.powf(1.0 / p);
    if !(gamma > 0.0 && gamma <= limit) {
        return Err(Error::Domain(format!(
            "no g1 exists for gamma = {gamma}: gamma must lie in (0, c/2^(1/p)] = (0, {limit}]"
        )));
    }
    let cp = c.powf(p);
    let rest = cp - 2.0 * gamma.powf(p);
    // At the upper end of the range the difference is pure rounding noise.
    if rest <= 1e-12 * cp {
        return Ok(0.0);
    }
    Ok(rest.powf(1.0 / p))
}

/// `γ = n^(1/p)·c`: switches only pay off against wrong assignments lasting
/// more than `n` steps.
pub fn gamma_from_n(c: f64, p: f64, n: u32) -> Result<f64> {
    check_cp(c, p)?;
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(f64::from(n).powf(1.0 / p) * c)
}

/// `h_{n+m} = (m/(n+m))^(1/p)·c`: with `γ = gamma_from_n(c, p, n)`, a wrong
/// assignment over `n + m` steps is corrected by a switch iff its distance
/// exceeds this threshold.
pub fn h_threshold(c: f64, p: f64, n: u32, m: u32) -> Result<f64> {
    check_cp(c, p)?;
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok((f64::from(m) / f64::from(n + m)).powf(1.0 / p) * c)
}

/// `p = ln 2 / (ln c − ln a)` for `c/2 ≤ a < c`; `a = c/2` gives `p = 1`.
pub fn p_from_a_c(c: f64, a: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("c must be positive and finite, got {c}")));
    }
    if !(a >= c / 2.0 && a < c) {
        return Err(Error::Domain(format!("a must lie in [c/2, c) = [{}, {c}), got {a}", c / 2.0)));
    }
    if a == c / 2.0 {
        return Ok(1.0);
    }
    Ok(std::f64::consts::LN_2 / (c.ln() - a.ln()))
}

/// The two ways of choosing `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaRule {
    /// Penalise short-term switches relative to localization error `g₁`.
    Small { g1: f64 },
    /// Only long-lasting wrong assignments (more than `n` steps) are switched.
    Large { n: u32 },
}

impl GammaRule {
    pub fn gamma(&self, c: f64, p: f64) -> Result<f64> {
        match *self {
            GammaRule::Small { g1 } => gamma_from_g1(c, p, g1),
            GammaRule::Large { n } => gamma_from_n(c, p, n),
        }
    }
}

/// Distances of the optimal GOSPA (p = 2, c = `c_max`) matches at every time
/// step, concatenated in step order.
pub fn collect_assignment_distances<T, M: Metric<T> + ?Sized>(
    x: &TrajectorySet<T>,
    y: &TrajectorySet<T>,
    c_max: f64,
    metric: &M,
) -> Vec<f64> {
    let steps = x.steps().max(y.steps());
    let mut out = Vec::new();
    for k in 0..steps {
        let xs: Vec<&T> = x.column(k).into_iter().flatten().collect();
        let ys: Vec<&T> = y.column(k).into_iter().flatten().collect();
        if xs.is_empty() || ys.is_empty() {
            continue;
        }
        out.extend(gospa_step(&xs, &ys, 2.0, c_max, metric).pairs.into_iter().map(|(_, _, d)| d));
    }
    out
}

/// Histogram of assignment distances and the squared-distance weighted
/// variant, the discrete derivatives of the number of assignments and of the
/// summed squared localization error as functions of `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidelineHistogram {
    pub bin_width: f64,
    pub bin_centers: Vec<f64>,
    pub diff_n: Vec<u64>,
    pub diff_l: Vec<f64>,
}

/// Bins `samples` over `[0, c_max]` with the given width. Samples outside the
/// range are ignored; a sample equal to `c_max` goes to the last bin.
pub fn guideline_histogram(samples: &[f64], bin_width: f64, c_max: f64) -> Result<GuidelineHistogram> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(Error::Domain(format!("bin width must be positive, got {bin_width}")));
    }
    if !(c_max.is_finite() && c_max > 0.0) {
        return Err(Error::Domain(format!("c_max must be positive, got {c_max}")));
    }
    // Round first so that 1 / 0.005 gives 200 bins, not 201.
    let bins = ((c_max / bin_width * 1e9).round() / 1e9).ceil().max(1.0) as usize;
    let bin_centers: Vec<f64> = (0..bins).map(|b| (b as f64 + 0.5) * bin_width).collect();
    let mut diff_n = vec![0u64; bins];
    for &s in samples {
        if !(0.0..=c_max).contains(&s) {
            continue;
        }
        let b = ((s / bin_width).floor() as usize).min(bins - 1);
        diff_n[b] += 1;
    }
    let diff_l = diff_n
        .iter()
        .zip(&bin_centers)
        .map(|(n, c)| *n as f64 * c * c)
        .collect();
    Ok(GuidelineHistogram {
        bin_width,
        bin_centers,
        diff_n,
        diff_l,
    })
}

impl GuidelineHistogram {
    pub fn total(&self) -> u64 {
        self.diff_n.iter().sum()
    }

    /// CSV with header `bin_center,diff_N,diff_L`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_center,diff_N,diff_L\n");
        for ((c, n), l) in self.bin_centers.iter().zip(&self.diff_n).zip(&self.diff_l) {
            let _ = writeln!(out, "{c},{n},{l}");
        }
        out
    }
}
