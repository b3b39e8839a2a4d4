//! Axis-aligned bounding boxes and the base metrics defined on them.
//!
//! Three metrics are provided: the IoU-induced metric `1 - IoU`, the
//! Hausdorff metric under the maximum norm, and the 2-Wasserstein distance
//! between uniform distributions supported on the boxes. All of them
//! implement [`Metric`], the abstraction the trajectory metrics are generic
//! over.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle in image coordinates (y grows downwards).
///
/// Stored as `(left, top, width, height)`, the MOTChallenge layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl BoundingBox {
    /// Builds a box, rejecting non-finite fields and non-positive extents.
    pub fn new(left: f64, top: f64, width: f64, height: f64) -> Result<Self> {
        if ![left, top, width, height].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidBox(format!(
                "non-finite field in ({left}, {top}, {width}, {height})"
            )));
        }
        if width <= 0.0 || height <= 0.0 {
            return Err(Error::InvalidBox(format!(
                "width and height must be positive, got {width} x {height}"
            )));
        }
        Ok(Self {
            left,
            top,
            width,
            height,
        })
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.top + self.height
    }

    pub fn center(&self) -> (f64, f64) {
        (self.left + 0.5 * self.width, self.top + 0.5 * self.height)
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Uniformly scales all four fields by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.left * s, self.top * s, self.width * s, self.height * s)
    }

    fn intersection_area(&self, other: &Self) -> f64 {
        let w = self.right().min(other.right()) - self.left.max(other.left);
        let h = self.bottom().min(other.bottom()) - self.top.max(other.top);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }
}

/// Intersection over union. Touching boxes have zero intersection.
pub fn iou(x: &BoundingBox, y: &BoundingBox) -> f64 {
    if x == y {
        return 1.0;
    }
    let inter = x.intersection_area(y);
    if inter == 0.0 {
        return 0.0;
    }
    let union = x.area() + y.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// The IoU-induced metric `1 - IoU(x, y)`; scale invariant, bounded by 1.
pub fn d_iou(x: &BoundingBox, y: &BoundingBox) -> f64 {
    1.0 - iou(x, y)
}

/// Hausdorff distance between the two rectangles with the maximum norm on
/// the plane: the largest end-point discrepancy over both axes.
pub fn d_hausdorff(x: &BoundingBox, y: &BoundingBox) -> f64 {
    let dim1 = (x.left - y.left).abs().max((x.right() - y.right()).abs());
    let dim2 = (x.top - y.top).abs().max((x.bottom() - y.bottom()).abs());
    dim1.max(dim2)
}

/// 2-Wasserstein distance between uniform distributions on the rectangles.
pub fn d_wasserstein(x: &BoundingBox, y: &BoundingBox) -> f64 {
    let (cx1, cy1) = x.center();
    let (cx2, cy2) = y.center();
    let dw = 0.5 * (x.width - y.width);
    let dh = 0.5 * (x.height - y.height);
    ((cx1 - cx2).powi(2) + (cy1 - cy2).powi(2) + (dw * dw + dh * dh) / 3.0).sqrt()
}

/// A metric on some space of object instances.
pub trait Metric<T: ?Sized> {
    fn distance(&self, a: &T, b: &T) -> f64;
}

impl<T: ?Sized, F> Metric<T> for F
where
    F: Fn(&T, &T) -> f64,
{
    fn distance(&self, a: &T, b: &T) -> f64 {
        self(a, b)
    }
}

/// Choice of base metric for bounding boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxMetric {
    #[default]
    Iou,
    Hausdorff,
    Wasserstein,
}

impl BoxMetric {
    pub const ALL: [BoxMetric; 3] = [BoxMetric::Iou, BoxMetric::Hausdorff, BoxMetric::Wasserstein];

    pub fn name(&self) -> &'static str {
        match self {
            BoxMetric::Iou => "iou",
            BoxMetric::Hausdorff => "hausdorff",
            BoxMetric::Wasserstein => "wasserstein",
        }
    }
}

impl Metric<BoundingBox> for BoxMetric {
    fn distance(&self, a: &BoundingBox, b: &BoundingBox) -> f64 {
        match self {
            BoxMetric::Iou => d_iou(a, b),
            BoxMetric::Hausdorff => d_hausdorff(a, b),
            BoxMetric::Wasserstein => d_wasserstein(a, b),
        }
    }
}

impl fmt::Display for BoxMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoxMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iou" => Ok(BoxMetric::Iou),
            "hausdorff" => Ok(BoxMetric::Hausdorff),
            "wasserstein" => Ok(BoxMetric::Wasserstein),
            other => Err(Error::InvalidParams(format!("unknown base metric '{other}'"))),
        }
    }
}

/// Euclidean distance on fixed-size point vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl<const N: usize> Metric<[f64; N]> for Euclidean {
    fn distance(&self, a: &[f64; N], b: &[f64; N]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt()
    }
}

impl Metric<f64> for Euclidean {
    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }
}
