//! Scoring digit exemplars against a set of reference patterns.

use std::fmt::Write as _;

use thiserror::Error;

use crate::mnist::{BinaryMask, LabeledDigit, ThresholdRule};
use crate::pipeline::{compare_features, curve_features, CurveFeatures, PipelineConfig, StageError};

/// Mean-potential level above which no pattern counts as matching.
pub const DEFAULT_REJECT_THRESHOLD: f64 = 13.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Exemplar {
    pub index: usize,
    pub label: u8,
    pub mask: BinaryMask,
}

impl Exemplar {
    pub fn from_digit(digit: &LabeledDigit, limit: u8, rule: ThresholdRule) -> Self {
        Self {
            index: digit.index,
            label: digit.label,
            mask: digit.image.threshold(limit, rule),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyRow {
    pub index: usize,
    pub label: u8,
    /// One mean potential per pattern; empty when `error` is set.
    pub scores: Vec<f64>,
    pub best: Option<usize>,
    pub rejected: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyReport {
    pub threshold: f64,
    pub patterns: usize,
    pub rows: Vec<ClassifyRow>,
}

#[derive(Debug, Error, PartialEq)]
#[error("pattern {pattern}: {source}")]
pub struct PatternFailure {
    pub pattern: usize,
    pub source: StageError,
}

impl ClassifyReport {
    /// `index,label,s0..s9,best,rejected`. Failed rows leave scores and
    /// `best` empty and count as rejected.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,label");
        for k in 0..self.patterns {
            let _ = write!(out, ",s{k}");
        }
        out.push_str(",best,rejected\n");
        for row in &self.rows {
            let _ = write!(out, "{},{}", row.index, row.label);
            if row.scores.is_empty() {
                out.push_str(&",".repeat(self.patterns));
            }
            for s in &row.scores {
                let _ = write!(out, ",{s}");
            }
            match row.best {
                Some(b) => {
                    let _ = write!(out, ",{b}");
                }
                None => out.push(','),
            }
            let _ = writeln!(out, ",{}", row.rejected);
        }
        out
    }

    pub fn correct(&self) -> usize {
        self.rows.iter().filter(|r| r.best == Some(r.label as usize)).count()
    }
}

fn prepare_patterns(patterns: &[BinaryMask], config: &PipelineConfig) -> Result<Vec<CurveFeatures>, PatternFailure> {
    patterns
        .iter()
        .enumerate()
        .map(|(pattern, mask)| curve_features(mask, config).map_err(|source| PatternFailure { pattern, source }))
        .collect()
}

fn score_row(exemplar: &Exemplar, patterns: &[CurveFeatures], config: &PipelineConfig, threshold: f64) -> ClassifyRow {
    let scored = curve_features(&exemplar.mask, config).and_then(|x| {
        patterns
            .iter()
            .map(|p| {
                compare_features(&x.features, &p.features, &config.weights, &config.search)
                    .map(|(_, r)| r.mean_potential)
            })
            .collect::<Result<Vec<f64>, StageError>>()
    });
    match scored {
        Ok(scores) => {
            let best = scores
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(k, _)| k);
            let rejected = best.is_none_or(|b| scores[b] > threshold);
            ClassifyRow {
                index: exemplar.index,
                label: exemplar.label,
                scores,
                best,
                rejected,
                error: None,
            }
        }
        Err(err) => ClassifyRow {
            index: exemplar.index,
            label: exemplar.label,
            scores: Vec::new(),
            best: None,
            rejected: true,
            error: Some(err.to_string()),
        },
    }
}

/// Scores every exemplar against every pattern. Exemplars that fail a stage
/// become error rows; a pattern that fails aborts the run.
pub fn classify(
    exemplars: &[Exemplar],
    patterns: &[BinaryMask],
    config: &PipelineConfig,
    threshold: f64,
) -> Result<ClassifyReport, PatternFailure> {
    classify_parallel(exemplars, patterns, config, threshold, 1)
}

/// Same as [`classify`], spreading exemplars over `jobs` threads. Row order
/// and values do not depend on `jobs`.
pub fn classify_parallel(
    exemplars: &[Exemplar],
    patterns: &[BinaryMask],
    config: &PipelineConfig,
    threshold: f64,
    jobs: usize,
) -> Result<ClassifyReport, PatternFailure> {
    let prepared = prepare_patterns(patterns, config)?;
    let jobs = jobs.max(1);
    let rows = if jobs == 1 || exemplars.len() < 2 {
        exemplars
            .iter()
            .map(|e| score_row(e, &prepared, config, threshold))
            .collect()
    } else {
        let chunk = exemplars.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = exemplars
                .chunks(chunk)
                .map(|part| {
                    let prepared = &prepared;
                    scope.spawn(move || {
                        part.iter()
                            .map(|e| score_row(e, prepared, config, threshold))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("classify worker panicked"))
                .collect()
        })
    };
    Ok(ClassifyReport {
        threshold,
        patterns: patterns.len(),
        rows,
    })
}
