//! Equal arc-length resampling and height normalization of traced curves.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::border::ClosedCurve;

/// Points per resampled curve.
pub const CURVE_POINTS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub w: f64,
    pub h: f64,
}

impl Point {
    pub const fn new(w: f64, h: f64) -> Self {
        Self { w, h }
    }

    pub fn distance(self, other: Self) -> f64 {
        (self.w - other.w).hypot(self.h - other.h)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NormalizeError {
    #[error("curve has {0} points, need at least 2")]
    TooShort(usize),
    #[error("curve has zero perimeter")]
    ZeroPerimeter,
    #[error("curve has zero height span")]
    FlatCurve,
}

/// Points equally spaced along a closed polygon.
///
/// Coordinates are relative to the top-left corner of the source curve's
/// bounding box, so integer translations of the source give identical
/// samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResampledCurve {
    pub points: Vec<Point>,
}

impl ResampledCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rotated(&self, k: usize) -> Self {
        let mut points = self.points.clone();
        let n = points.len().max(1);
        points.rotate_left(k % n);
        Self { points }
    }
}

/// Curve in height-normalized coordinates `(W, H)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedCurve {
    pub points: Vec<Point>,
    /// Height span of the resampled curve used as the divisor.
    pub d: f64,
}

impl NormalizedCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rotated(&self, k: usize) -> Self {
        let mut points = self.points.clone();
        let n = points.len().max(1);
        points.rotate_left(k % n);
        Self { points, d: self.d }
    }
}

/// Divides the closed polygon (closing edge included) into `count` pieces of
/// equal length, starting at the curve's first point.
pub fn resample(curve: &ClosedCurve, count: usize) -> Result<ResampledCurve, NormalizeError> {
    let n = curve.points.len();
    if n < 2 {
        return Err(NormalizeError::TooShort(n));
    }
    let min_w = curve.points.iter().map(|p| p.w).min().unwrap_or(0);
    let min_h = curve.points.iter().map(|p| p.h).min().unwrap_or(0);
    let vertices: Vec<Point> = curve
        .points
        .iter()
        .map(|p| Point::new((p.w - min_w) as f64, (p.h - min_h) as f64))
        .collect();
    Ok(ResampledCurve {
        points: resample_polygon(&vertices, count)?,
    })
}

/// Equal arc-length resampling of an arbitrary closed real polygon.
pub fn resample_polygon(vertices: &[Point], count: usize) -> Result<Vec<Point>, NormalizeError> {
    let n = vertices.len();
    if n < 2 {
        return Err(NormalizeError::TooShort(n));
    }
    let lengths: Vec<f64> = (0..n).map(|i| vertices[i].distance(vertices[(i + 1) % n])).collect();
    let mut starts = Vec::with_capacity(n);
    let mut total = 0.0;
    for &len in &lengths {
        starts.push(total);
        total += len;
    }
    if total <= 0.0 {
        return Err(NormalizeError::ZeroPerimeter);
    }

    let mut out = Vec::with_capacity(count);
    let mut edge = 0;
    for k in 0..count {
        let target = k as f64 * total / count as f64;
        while edge + 1 < n && starts[edge + 1] <= target {
            edge += 1;
        }
        let (a, b) = (vertices[edge], vertices[(edge + 1) % n]);
        let t = if lengths[edge] > 0.0 {
            (target - starts[edge]) / lengths[edge]
        } else {
            0.0
        };
        out.push(Point::new(a.w + t * (b.w - a.w), a.h + t * (b.h - a.h)));
    }
    Ok(out)
}

/// Order-independent sum: the same multiset of values always gives the same
/// bits, which keeps cyclic relabeling exact.
fn stable_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sorted: Vec<f64> = values.collect();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum()
}

/// `H = (h - min h) / d`, `W = (w - mean w) / d` with `d = max h - min h`,
/// all taken over the resampled points.
pub fn normalize_coords(curve: &ResampledCurve) -> Result<NormalizedCurve, NormalizeError> {
    if curve.points.is_empty() {
        return Err(NormalizeError::TooShort(0));
    }
    let min_h = curve.points.iter().map(|p| p.h).fold(f64::INFINITY, f64::min);
    let max_h = curve.points.iter().map(|p| p.h).fold(f64::NEG_INFINITY, f64::max);
    let d = max_h - min_h;
    if d <= 1e-12 {
        return Err(NormalizeError::FlatCurve);
    }
    let mean_w = stable_sum(curve.points.iter().map(|p| p.w)) / curve.points.len() as f64;
    Ok(NormalizedCurve {
        points: curve
            .points
            .iter()
            .map(|p| Point::new((p.w - mean_w) / d, (p.h - min_h) / d))
            .collect(),
        d,
    })
}
