//! The potential torus: weighted feature distance between every point pair.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{is_angle_feature, FeatureMatrix, FEATURE_COUNT};

#[derive(Debug, Error, PartialEq)]
pub enum WeightsError {
    #[error("expected {FEATURE_COUNT} weights or an angle,other pair, got {0}")]
    Length(usize),
    #[error("weights must be finite and nonnegative")]
    Negative,
    #[error("weights are all zero")]
    AllZero,
    #[error("cannot parse weight {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeights(Vec<f64>);

impl FeatureWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self, WeightsError> {
        if weights.len() != FEATURE_COUNT {
            return Err(WeightsError::Length(weights.len()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(WeightsError::Negative);
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(WeightsError::AllZero);
        }
        Ok(Self(weights))
    }

    /// `angle` for the 9 angle-derived features, `other` for the rest.
    pub fn split(angle: f64, other: f64) -> Result<Self, WeightsError> {
        Self::new(
            (0..FEATURE_COUNT)
                .map(|k| if is_angle_feature(k) { angle } else { other })
                .collect(),
        )
    }

    /// Parses either `angle,other` or 45 comma-separated values.
    pub fn parse(text: &str) -> Result<Self, WeightsError> {
        let values = text
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| WeightsError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        match values.len() {
            2 => Self::split(values[0], values[1]),
            _ => Self::new(values),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Default for FeatureWeights {
    fn default() -> Self {
        Self::split(3.0, 1.0).expect("default weights are valid")
    }
}

/// Grid of potential values; `i` indexes curve X, `j` indexes curve Y, both
/// cyclic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialTorus {
    pub rows: usize,
    pub cols: usize,
    /// Row-major: `values[i * cols + j]`.
    pub values: Vec<f64>,
}

impl PotentialTorus {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), rows * cols, "value count must match dimensions");
        assert!(rows > 0 && cols > 0, "torus must be nonempty");
        Self { rows, cols, values }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = (0..rows * cols).map(|n| f(n / cols, n % cols)).collect();
        Self::new(rows, cols, values)
    }

    /// Value at `(i, j)` with both indices taken modulo the torus size.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i % self.rows) * self.cols + j % self.cols]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn transposed(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Torus with columns relabeled so that new column `j` is old `j + k`.
    pub fn rotated_cols(&self, k: usize) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j + k))
    }
}

/// `V(i,j) = Σ_k weights[k] · |fx[i,k] - fy[j,k]|`.
pub fn build_potential(fx: &FeatureMatrix, fy: &FeatureMatrix, weights: &FeatureWeights) -> PotentialTorus {
    let w = weights.as_slice();
    PotentialTorus::from_fn(fx.rows, fy.rows, |i, j| {
        fx.row(i)
            .iter()
            .zip(fy.row(j))
            .zip(w)
            .map(|((a, b), wk)| wk * (a - b).abs())
            .sum()
    })
}
