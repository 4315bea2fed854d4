//! Scoring extracted label sets against golden dependency lists.
//!
//! All three measures work per project: the dependency-count correlation and
//! mean absolute error compare set sizes, the match rate demands exact set
//! equality.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One project's extracted labels next to its golden list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationPair {
    pub project_id: String,
    pub predicted: BTreeSet<String>,
    pub golden: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub n: usize,
    /// Pearson correlation of per-project counts; `None` when either side
    /// has zero variance.
    pub pearson: Option<f64>,
    /// Mean absolute error of per-project counts.
    pub mae: f64,
    /// Fraction of projects whose label set equals the golden set exactly.
    pub match_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("correlation needs at least two projects, got {0}")]
    TooFewProjects(usize),
    #[error("paired series differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// Pearson product-moment correlation. Fewer than two points is an error;
/// a flat series has no defined correlation and yields `None`.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<Option<f64>, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.len() < 2 {
        return Err(MetricsError::TooFewProjects(xs.len()));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Ok(None);
    }
    Ok(Some(cov / (var_x.sqrt() * var_y.sqrt())))
}

/// Mean absolute difference between paired values.
pub fn mean_absolute_error(xs: &[f64], ys: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = xs.iter().zip(ys).map(|(x, y)| (x - y).abs()).sum();
    Ok(total / xs.len() as f64)
}

/// Fraction of pairs with exact set equality.
pub fn match_rate(pairs: &[EvaluationPair]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let hits = pairs.iter().filter(|p| p.predicted == p.golden).count();
    hits as f64 / pairs.len() as f64
}

/// Scores a corpus of evaluation pairs.
pub fn evaluate(pairs: &[EvaluationPair]) -> Result<MetricsSummary, MetricsError> {
    if pairs.len() < 2 {
        return Err(MetricsError::TooFewProjects(pairs.len()));
    }
    let predicted: Vec<f64> = pairs.iter().map(|p| p.predicted.len() as f64).collect();
    let golden: Vec<f64> = pairs.iter().map(|p| p.golden.len() as f64).collect();
    Ok(MetricsSummary {
        n: pairs.len(),
        pearson: pearson(&predicted, &golden)?,
        mae: mean_absolute_error(&predicted, &golden)?,
        match_rate: match_rate(pairs),
    })
}

/// Reads a golden list: one `group:artifact:version` per line, `#` comments
/// and blank lines skipped.
pub fn parse_golden(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}
