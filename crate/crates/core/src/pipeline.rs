//! Mask-to-score composition of all stages.

use serde::Serialize;
use thiserror::Error;

use crate::border::{outer_borderline, ClosedCurve, TraceError};
use crate::features::{feature_matrix, FeatureConfig, FeatureMatrix};
use crate::mnist::BinaryMask;
use crate::normalize::{normalize_coords, resample, NormalizeError, NormalizedCurve, ResampledCurve, CURVE_POINTS};
use crate::potential::{build_potential, FeatureWeights, PotentialTorus};
use crate::search::{canonical_path, MatchResult, SearchConfig, SearchError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Trace,
    Resample,
    Normalize,
    Search,
}

#[derive(Debug, Error, PartialEq)]
pub enum StageError {
    #[error("trace: {0}")]
    Trace(#[from] TraceError),
    #[error("resample: {0}")]
    Resample(NormalizeError),
    #[error("normalize: {0}")]
    Normalize(NormalizeError),
    #[error("search: {0}")]
    Search(#[from] SearchError),
}

impl StageError {
    pub fn stage(&self) -> Stage {
        match self {
            StageError::Trace(_) => Stage::Trace,
            StageError::Resample(_) => Stage::Resample,
            StageError::Normalize(_) => Stage::Normalize,
            StageError::Search(_) => Stage::Search,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub points: usize,
    pub features: FeatureConfig,
    pub weights: FeatureWeights,
    pub search: SearchConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            points: CURVE_POINTS,
            features: FeatureConfig::default(),
            weights: FeatureWeights::default(),
            search: SearchConfig::default(),
        }
    }
}

/// Every intermediate product for one mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFeatures {
    pub curve: ClosedCurve,
    pub resampled: ResampledCurve,
    pub normalized: NormalizedCurve,
    pub features: FeatureMatrix,
}

pub fn curve_features(mask: &BinaryMask, config: &PipelineConfig) -> Result<CurveFeatures, StageError> {
    let curve = outer_borderline(mask)?;
    features_of_curve(curve, config)
}

pub fn features_of_curve(curve: ClosedCurve, config: &PipelineConfig) -> Result<CurveFeatures, StageError> {
    let resampled = resample(&curve, config.points).map_err(StageError::Resample)?;
    let normalized = normalize_coords(&resampled).map_err(StageError::Normalize)?;
    let features = feature_matrix(&normalized, config.features);
    Ok(CurveFeatures {
        curve,
        resampled,
        normalized,
        features,
    })
}

/// Potential and canonical path for two prepared curves.
pub fn compare_features(
    x: &FeatureMatrix,
    y: &FeatureMatrix,
    weights: &FeatureWeights,
    search: &SearchConfig,
) -> Result<(PotentialTorus, MatchResult), StageError> {
    let v = build_potential(x, y, weights);
    let result = canonical_path(&v, search)?;
    Ok((v, result))
}

/// Mean potential along the canonical path of the outer borderlines of two
/// masks. Lower means more similar.
pub fn similarity(
    x: &BinaryMask,
    y: &BinaryMask,
    weights: &FeatureWeights,
    search: &SearchConfig,
) -> Result<MatchResult, StageError> {
    let config = PipelineConfig {
        weights: weights.clone(),
        search: *search,
        ..PipelineConfig::default()
    };
    similarity_with(x, y, &config).map(|(_, r)| r)
}

pub fn similarity_with(
    x: &BinaryMask,
    y: &BinaryMask,
    config: &PipelineConfig,
) -> Result<(PotentialTorus, MatchResult), StageError> {
    let fx = curve_features(x, config)?;
    let fy = curve_features(y, config)?;
    compare_features(&fx.features, &fy.features, &config.weights, &config.search)
}
