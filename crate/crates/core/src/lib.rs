//! Similarity of closed curves on a discrete plane.
//!
//! A digit raster is thresholded into a mask, its outer borderline is traced
//! as a closed lattice curve, resampled to 60 equally spaced points and
//! normalized by height. Each point gets 45 local features. Two curves span a
//! 60×60 potential torus of weighted feature distances, and the mean potential
//! along a greedy valley-following cycle (the canonical path) is the
//! similarity score: lower is more similar.
//!
//! ```
//! use closed_curves::{patterns, similarity, FeatureWeights, SearchConfig, TieRule};
//!
//! let six = patterns::builtin(6);
//! let config = SearchConfig { tie_rule: TieRule::Deterministic, ..SearchConfig::default() };
//! let result = similarity(&six, &six, &FeatureWeights::default(), &config).unwrap();
//! assert_eq!(result.mean_potential, 0.0);
//! ```

pub mod border;
pub mod classify;
pub mod features;
pub mod heatmap;
pub mod mnist;
pub mod normalize;
pub mod patterns;
pub mod pipeline;
pub mod potential;
pub mod search;

pub use border::{outer_borderline, ClosedCurve, LatticePoint, Orientation, TraceError};
pub use classify::{classify, ClassifyReport, ClassifyRow, Exemplar};
pub use features::{feature_matrix, AngleUnit, FeatureConfig, FeatureMatrix, FEATURE_COUNT};
pub use heatmap::{render_heatmap, HeatmapSpec};
pub use mnist::{BinaryMask, GrayImage, LabeledDigit, ThresholdRule};
pub use normalize::{normalize_coords, resample, NormalizedCurve, ResampledCurve, CURVE_POINTS};
pub use pipeline::{curve_features, similarity, PipelineConfig, Stage, StageError};
pub use potential::{build_potential, FeatureWeights, PotentialTorus};
pub use search::{canonical_path, MatchResult, Method, SearchConfig, SearchError, TieRule, TorusPath};
