//! Browser bindings: trace a drawing, compare it with a built-in pattern and
//! rank it against all ten patterns.
//!
//! Drawings arrive as a row-major gray canvas (`0` background, `255` ink).

use closed_curves::features::{AngleUnit, FeatureConfig};
use closed_curves::heatmap::{render_rgb, HeatmapSpec};
use closed_curves::mnist::{BinaryMask, GrayImage, ThresholdRule};
use closed_curves::patterns::builtin;
use closed_curves::pipeline::{compare_features, curve_features, PipelineConfig, StageError};
use closed_curves::search::{Method, SearchConfig, TieRule};
use serde_json::json;
use wasm_bindgen::prelude::*;

const GRAY_LIMIT: u8 = 80;

fn mask_of(width: usize, height: usize, pixels: &[u8]) -> Result<BinaryMask, String> {
    if pixels.len() != width * height {
        return Err(format!("expected {} pixels, got {}", width * height, pixels.len()));
    }
    Ok(GrayImage::new(width, height, pixels.to_vec()).threshold(GRAY_LIMIT, ThresholdRule::Greater))
}

/// Method names as shown in the page: `base`, `multistart`, `lookahead`.
pub fn config_for(method: &str, n: usize, radians: bool) -> Result<PipelineConfig, String> {
    let method = match method {
        "base" => Method::Base,
        "multistart" => Method::MultiStart { row: 0 },
        "lookahead" => Method::Lookahead { n },
        other => return Err(format!("unknown method {other}")),
    };
    Ok(PipelineConfig {
        features: FeatureConfig {
            angle_unit: if radians {
                AngleUnit::Radians
            } else {
                AngleUnit::Degrees
            },
            ..FeatureConfig::default()
        },
        search: SearchConfig {
            method,
            tie_rule: TieRule::Deterministic,
            ..SearchConfig::default()
        },
        ..PipelineConfig::default()
    })
}

/// Outer borderline of the drawing as `{"points": [[w, h], ...]}`.
pub fn trace_json(width: usize, height: usize, pixels: &[u8]) -> Result<String, String> {
    let mask = mask_of(width, height, pixels)?;
    let curve = closed_curves::border::outer_borderline(&mask).map_err(|e| e.to_string())?;
    let points: Vec<[i64; 2]> = curve.points.iter().map(|p| [p.w, p.h]).collect();
    Ok(json!({ "points": points }).to_string())
}

/// Score and heatmap of the drawing against one built-in pattern.
#[wasm_bindgen]
pub struct Comparison {
    mean: f64,
    path: String,
    width: usize,
    height: usize,
    rgba: Vec<u8>,
}

#[wasm_bindgen]
impl Comparison {
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Path cells, wrap counts and method as JSON.
    pub fn path_json(&self) -> String {
        self.path.clone()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Heatmap pixels for an `ImageData`.
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }
}

pub fn compare_pattern(
    width: usize,
    height: usize,
    pixels: &[u8],
    pattern: usize,
    config: &PipelineConfig,
    cell: usize,
) -> Result<Comparison, String> {
    if pattern > 9 {
        return Err(format!("no pattern {pattern}"));
    }
    let stage = |e: StageError| e.to_string();
    let x = curve_features(&mask_of(width, height, pixels)?, config).map_err(stage)?;
    let y = curve_features(&builtin(pattern), config).map_err(stage)?;
    let (v, result) = compare_features(&x.features, &y.features, &config.weights, &config.search).map_err(stage)?;
    let spec = HeatmapSpec {
        cell,
        ..HeatmapSpec::default()
    };
    let (w, h, rgb) = render_rgb(&v, Some(&result.path), &spec);
    let rgba = rgb.chunks(3).flat_map(|c| [c[0], c[1], c[2], 255]).collect();
    Ok(Comparison {
        mean: result.mean_potential,
        path: serde_json::to_string(&result).expect("match result serializes"),
        width: w,
        height: h,
        rgba,
    })
}

/// Scores against patterns 0..9 as `{"scores": [...], "best": k}`.
pub fn rank_json(width: usize, height: usize, pixels: &[u8], config: &PipelineConfig) -> Result<String, String> {
    let x = curve_features(&mask_of(width, height, pixels)?, config).map_err(|e| e.to_string())?;
    let mut scores = Vec::with_capacity(10);
    for d in 0..10 {
        let y = curve_features(&builtin(d), config).map_err(|e| e.to_string())?;
        let (_, r) =
            compare_features(&x.features, &y.features, &config.weights, &config.search).map_err(|e| e.to_string())?;
        scores.push(r.mean_potential);
    }
    let best = (0..10).min_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    Ok(json!({ "scores": scores, "best": best }).to_string())
}

#[wasm_bindgen]
pub fn trace_drawing(width: usize, height: usize, pixels: &[u8]) -> Result<String, JsError> {
    trace_json(width, height, pixels).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare_drawing(
    width: usize,
    height: usize,
    pixels: &[u8],
    pattern: usize,
    method: &str,
    n: usize,
    radians: bool,
) -> Result<Comparison, JsError> {
    let config = config_for(method, n, radians).map_err(|e| JsError::new(&e))?;
    compare_pattern(width, height, pixels, pattern, &config, 4).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn classify_drawing(
    width: usize,
    height: usize,
    pixels: &[u8],
    method: &str,
    n: usize,
    radians: bool,
) -> Result<String, JsError> {
    let config = config_for(method, n, radians).map_err(|e| JsError::new(&e))?;
    rank_json(width, height, pixels, &config).map_err(|e| JsError::new(&e))
}

/// Built-in pattern `digit` centered on a `size` x `size` canvas, `0`/`255`.
#[wasm_bindgen]
pub fn pattern_pixels(digit: usize, size: usize) -> Vec<u8> {
    let mask = builtin(digit.min(9));
    let (dw, dh) = (
        size.saturating_sub(mask.width) / 2,
        size.saturating_sub(mask.height) / 2,
    );
    let mut pixels = vec![0u8; size * size];
    for h in 0..mask.height.min(size) {
        for w in 0..mask.width.min(size) {
            if mask.is_inside(w as i64, h as i64) && w + dw < size && h + dh < size {
                pixels[(h + dh) * size + w + dw] = 255;
            }
        }
    }
    pixels
}
