//! Similarity metrics scoring a prediction against the ground truth.
//!
//! All three metrics are bounded above by 1 (perfect agreement). Cosine
//! similarity compares raw vectors; the other two first normalize each series
//! by its own mean, so they compare shapes at equal level. The normalization
//! rule and the zero-denominator conventions are chosen so degenerate
//! coalitions score as uninformative instead of erroring mid-run.

use serde::{Deserialize, Serialize};

use std::fmt;

/// Metric selector, by the names used in run configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMetric {
    CosSim,
    NumSim,
    Rdtw,
}

impl SimilarityMetric {
    pub const ALL: [SimilarityMetric; 3] = [
        SimilarityMetric::CosSim,
        SimilarityMetric::NumSim,
        SimilarityMetric::Rdtw,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "cossim" => Some(Self::CosSim),
            "numsim" => Some(Self::NumSim),
            "rdtw" => Some(Self::Rdtw),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CosSim => "cossim",
            Self::NumSim => "numsim",
            Self::Rdtw => "rdtw",
        }
    }

    /// Scores `pred` against `truth`.
    pub fn score(&self, truth: &[f64], pred: &[f64]) -> f64 {
        match self {
            Self::CosSim => cosine_similarity(truth, pred),
            Self::NumSim => numerical_similarity(truth, pred),
            Self::Rdtw => relative_dtw(truth, pred),
        }
    }
}

impl fmt::Display for SimilarityMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cosine similarity of two equal-length non-negative vectors, in `[0, 1]`.
/// Either vector having zero norm scores 0.
pub fn cosine_similarity(truth: &[f64], pred: &[f64]) -> f64 {
    assert_eq!(truth.len(), pred.len(), "cosine_similarity: length mismatch");
    assert!(!truth.is_empty(), "cosine_similarity: empty input");
    let mut dot = 0.0;
    let mut ss_truth = 0.0;
    let mut ss_pred = 0.0;
    for (a, b) in truth.iter().zip(pred) {
        dot += a * b;
        ss_truth += a * a;
        ss_pred += b * b;
    }
    if ss_truth == 0.0 || ss_pred == 0.0 {
        return 0.0;
    }
    // sqrt of the product (rather than product of sqrts) makes the
    // identical-vectors case come out exactly 1.0.
    dot / (ss_truth * ss_pred).sqrt()
}

/// Divides a series by its own mean; an all-zero series normalizes to all zeros.
fn mean_normalize(values: &[f64]) -> Vec<f64> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean == 0.0 {
        vec![0.0; values.len()]
    } else {
        values.iter().map(|v| v / mean).collect()
    }
}

/// Numerical similarity: one minus the mean relative disagreement per bin,
/// computed on mean-normalized series. A bin where both normalized series are
/// zero contributes no disagreement.
pub fn numerical_similarity(truth: &[f64], pred: &[f64]) -> f64 {
    assert_eq!(truth.len(), pred.len(), "numerical_similarity: length mismatch");
    assert!(!truth.is_empty(), "numerical_similarity: empty input");
    let truth = mean_normalize(truth);
    let pred = mean_normalize(pred);
    let n = truth.len() as f64;
    let mut disagreement = 0.0;
    for (a, b) in truth.iter().zip(&pred) {
        let denom = a + b;
        if denom != 0.0 {
            disagreement += (a - b).abs() / denom;
        }
    }
    1.0 - disagreement / n
}

/// Classic dynamic-time-warping distance with local cost `|a_i - b_j|`, full
/// window and boundary-matched path. Symmetric, and zero for identical inputs.
///
/// Runs the O(len^2) full table with a rolling row; control windows are at
/// most a few hundred bins, so no banding is needed.
pub fn dtw_distance(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "dtw_distance: empty input");
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &ai in a {
        curr[0] = f64::INFINITY;
        for j in 1..=m {
            let cost = (ai - b[j - 1]).abs();
            curr[j] = cost + prev[j].min(curr[j - 1]).min(prev[j - 1]);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[m]
}

/// Relative DTW similarity: one minus the DTW distance between the
/// mean-normalized series, relative to the distance between the normalized
/// truth and the zero series. The truth must not be all-zero.
pub fn relative_dtw(truth: &[f64], pred: &[f64]) -> f64 {
    assert_eq!(truth.len(), pred.len(), "relative_dtw: length mismatch");
    assert!(!truth.is_empty(), "relative_dtw: empty input");
    let truth = mean_normalize(truth);
    assert!(
        truth.iter().any(|v| *v != 0.0),
        "relative_dtw: all-zero truth has no reference distance"
    );
    let pred = mean_normalize(pred);
    let zeros = vec![0.0; truth.len()];
    let reference = dtw_distance(&truth, &zeros);
    1.0 - dtw_distance(&truth, &pred) / reference
}
