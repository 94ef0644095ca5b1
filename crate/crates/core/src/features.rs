//! Local features along a normalized curve.
//!
//! Every point carries 45 values: for each smoothing window (3, 7, 13) and
//! each base coordinate (w, h, w+h, w-h, α), the value itself and its first
//! and second central differences. Column index is
//! `window * 15 + base * 3 + order`.

use serde::{Deserialize, Serialize};

use crate::normalize::{NormalizedCurve, Point};

pub const WINDOWS: [usize; 3] = [3, 7, 13];
pub const BASE_NAMES: [&str; 5] = ["w", "h", "w+h", "w-h", "angle"];
pub const ORDERS: usize = 3;
pub const FEATURE_COUNT: usize = WINDOWS.len() * BASE_NAMES.len() * ORDERS;
const ANGLE_BASE: usize = 4;

pub fn feature_index(window: usize, base: usize, order: usize) -> usize {
    window * BASE_NAMES.len() * ORDERS + base * ORDERS + order
}

/// True for the 9 columns derived from the direction angle.
pub fn is_angle_feature(index: usize) -> bool {
    (index / ORDERS) % BASE_NAMES.len() == ANGLE_BASE
}

pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_COUNT);
    for window in WINDOWS {
        for base in BASE_NAMES {
            for order in 0..ORDERS {
                names.push(format!("s{window}_{base}_d{order}"));
            }
        }
    }
    names
}

/// Unit of the angle-derived feature values. Base angles are always
/// computed in degrees; radians rescales the 9 angle features afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Degrees,
    Radians,
}

impl AngleUnit {
    fn scale(self) -> f64 {
        match self {
            AngleUnit::Degrees => 1.0,
            AngleUnit::Radians => std::f64::consts::PI / 180.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Store `|difference|` for orders 1 and 2; signed otherwise.
    pub absolute: bool,
    pub angle_unit: AngleUnit,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            absolute: true,
            angle_unit: AngleUnit::Degrees,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedCurve {
    pub window: usize,
    pub points: Vec<Point>,
}

/// Cyclic centered moving average of `W` and `H`.
pub fn smooth(curve: &NormalizedCurve, window: usize) -> SmoothedCurve {
    assert!(window % 2 == 1, "smoothing window must be odd");
    let n = curve.points.len();
    let r = (window / 2) as isize;
    let points = (0..n as isize)
        .map(|i| {
            let (mut w, mut h) = (0.0, 0.0);
            for k in i - r..=i + r {
                let p = curve.points[k.rem_euclid(n as isize) as usize];
                w += p.w;
                h += p.h;
            }
            Point::new(w / window as f64, h / window as f64)
        })
        .collect();
    SmoothedCurve { window, points }
}

/// Maps an angle difference in degrees to `(-180, 180]`.
pub fn wrap_degrees(delta: f64) -> f64 {
    let r = delta.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Direction of `successor - predecessor` in degrees, in `[0, 360)`.
/// Coinciding neighbors, as in a `(P,Q,P)` turn, give 180.
pub fn direction_angle(predecessor: Point, successor: Point) -> f64 {
    let (dw, dh) = (successor.w - predecessor.w, successor.h - predecessor.h);
    if dw.hypot(dh) < 1e-12 {
        return 180.0;
    }
    let deg = dh.atan2(dw).to_degrees().rem_euclid(360.0);
    if deg >= 360.0 {
        0.0
    } else {
        deg
    }
}

pub fn angle_at(curve: &SmoothedCurve, i: usize) -> f64 {
    let n = curve.points.len();
    direction_angle(curve.points[(i + n - 1) % n], curve.points[(i + 1) % n])
}

/// `[w, h, w+h, w-h, α]` per point.
pub fn base_coordinates(curve: &SmoothedCurve) -> Vec<[f64; 5]> {
    (0..curve.points.len())
        .map(|i| {
            let p = curve.points[i];
            [p.w, p.h, p.w + p.h, p.w - p.h, angle_at(curve, i)]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub rows: usize,
    /// Row-major, `rows * FEATURE_COUNT` values.
    pub values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), rows * FEATURE_COUNT);
        Self { rows, values }
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * FEATURE_COUNT + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * FEATURE_COUNT..(i + 1) * FEATURE_COUNT]
    }

    pub fn angle_mask(&self) -> [bool; FEATURE_COUNT] {
        std::array::from_fn(is_angle_feature)
    }

    pub fn rotated(&self, k: usize) -> Self {
        let mut values = self.values.clone();
        values.rotate_left((k % self.rows.max(1)) * FEATURE_COUNT);
        Self::new(self.rows, values)
    }
}

pub fn feature_matrix(curve: &NormalizedCurve, config: FeatureConfig) -> FeatureMatrix {
    let n = curve.points.len();
    let mut values = vec![0.0; n * FEATURE_COUNT];
    let finish = |x: f64| if config.absolute { x.abs() } else { x };
    for (wi, &window) in WINDOWS.iter().enumerate() {
        let base = base_coordinates(&smooth(curve, window));
        for b in 0..BASE_NAMES.len() {
            let diff = |i: usize| {
                let d = base[(i + 1) % n][b] - base[(i + n - 1) % n][b];
                if b == ANGLE_BASE {
                    wrap_degrees(d)
                } else {
                    d
                }
            };
            let first: Vec<f64> = (0..n).map(diff).collect();
            let unit = if b == ANGLE_BASE {
                config.angle_unit.scale()
            } else {
                1.0
            };
            for i in 0..n {
                let row = &mut values[i * FEATURE_COUNT..];
                row[feature_index(wi, b, 0)] = unit * base[i][b];
                row[feature_index(wi, b, 1)] = unit * finish(first[i]);
                row[feature_index(wi, b, 2)] = unit * finish(first[(i + 1) % n] - first[(i + n - 1) % n]);
            }
        }
    }
    FeatureMatrix::new(n, values)
}
