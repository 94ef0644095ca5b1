//! Potential heatmaps with an optional path overlay, written as binary PPM.
//!
//! Cell `(i, j)` is drawn at column `i`, row `j`: `i` runs left to right and
//! `j` top to bottom. Potential maps linearly from the low anchor (dark
//! green) to the high anchor (gray) between the torus minimum and maximum.
//! Path cells use their own ramp normalized over the path values only, so
//! small differences along the path stay visible.

use serde::{Deserialize, Serialize};

use crate::potential::PotentialTorus;
use crate::search::TorusPath;

pub type Rgb = [u8; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeatmapSpec {
    /// Edge length of one torus cell in pixels.
    pub cell: usize,
    pub low: Rgb,
    pub high: Rgb,
    pub path_low: Rgb,
    pub path_high: Rgb,
}

impl Default for HeatmapSpec {
    fn default() -> Self {
        Self {
            cell: 6,
            low: [0, 90, 30],
            high: [200, 200, 200],
            path_low: [255, 240, 0],
            path_high: [220, 0, 0],
        }
    }
}

/// Linear blend; `t` is clamped to `[0, 1]`.
pub fn ramp(low: Rgb, high: Rgb, t: f64) -> Rgb {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    std::array::from_fn(|c| (low[c] as f64 + t * (high[c] as f64 - low[c] as f64)).round() as u8)
}

fn unit(x: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (x - lo) / (hi - lo)
    } else {
        0.0
    }
}

/// Color of every torus cell, indexed `[j][i]` (screen rows).
pub fn cell_colors(v: &PotentialTorus, path: Option<&TorusPath>, spec: &HeatmapSpec) -> Vec<Vec<Rgb>> {
    let (lo, hi) = v.min_max();
    let mut colors: Vec<Vec<Rgb>> = (0..v.cols)
        .map(|j| {
            (0..v.rows)
                .map(|i| ramp(spec.low, spec.high, unit(v.get(i, j), lo, hi)))
                .collect()
        })
        .collect();
    if let Some(path) = path {
        let values = path.cells.iter().map(|&(i, j)| v.get(i, j));
        let plo = values.clone().fold(f64::INFINITY, f64::min);
        let phi = values.fold(f64::NEG_INFINITY, f64::max);
        for &(i, j) in &path.cells {
            if i < v.rows && j < v.cols {
                colors[j][i] = ramp(spec.path_low, spec.path_high, unit(v.get(i, j), plo, phi));
            }
        }
    }
    colors
}

/// Packed RGB rows of the heatmap: `(width, height, bytes)`.
pub fn render_rgb(v: &PotentialTorus, path: Option<&TorusPath>, spec: &HeatmapSpec) -> (usize, usize, Vec<u8>) {
    let cell = spec.cell.max(1);
    let (width, height) = (v.rows * cell, v.cols * cell);
    let colors = cell_colors(v, path, spec);
    let mut data = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        let row = &colors[y / cell];
        for x in 0..width {
            data.extend_from_slice(&row[x / cell]);
        }
    }
    (width, height, data)
}

pub fn encode_ppm(width: usize, height: usize, rgb: &[u8]) -> Vec<u8> {
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(rgb);
    out
}

pub fn render_heatmap(v: &PotentialTorus, path: Option<&TorusPath>, spec: &HeatmapSpec) -> Vec<u8> {
    let (w, h, rgb) = render_rgb(v, path, spec);
    encode_ppm(w, h, &rgb)
}
