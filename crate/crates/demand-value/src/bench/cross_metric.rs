//! Cross-metric validation: do the value shares survive swapping the
//! similarity metric?

use serde::Serialize;

use crate::approx::{Algorithm, EstimatorSpec};
use crate::bench::evaluate::BenchError;
use crate::forecast::ForecasterKind;
use crate::panel::DemandPanel;
use crate::series::SourceId;
use crate::similarity::SimilarityMetric;
use crate::valuation::{exact_shapley_with_limit, ForecastValueGame};

/// Shapley results for one metric: raw values and shares of the sum.
#[derive(Debug, Clone, Serialize)]
pub struct MetricShapley {
    pub metric: String,
    pub phi: Vec<f64>,
    pub shares: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricPairStats {
    pub first: String,
    pub second: String,
    /// Squared Pearson correlation of the share vectors.
    pub r_squared: f64,
    /// Size of the intersection of the two top-k source sets.
    pub top_k_overlap: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricCrossValidation {
    pub sources: Vec<SourceId>,
    pub per_metric: Vec<MetricShapley>,
    pub top_k: usize,
    pub pairs: Vec<MetricPairStats>,
}

/// Squared Pearson correlation, with the degenerate cases pinned: two
/// (near-)constant vectors agree perfectly if their levels match and not at
/// all otherwise.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx < 1e-18 || syy < 1e-18 {
        let level_match = (mx - my).abs() < 1e-9;
        return if sxx < 1e-18 && syy < 1e-18 && level_match { 1.0 } else { 0.0 };
    }
    (sxy * sxy) / (sxx * syy)
}

/// Indices of the `k` largest values, ties broken by lower index.
fn top_k_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Computes Shapley shares under each metric and compares them pairwise.
///
/// The estimator decides the route per metric: `exact` enumerates subsets (so
/// the panel must fit the exact limit), anything else samples with the given
/// seed.
pub fn metric_cross_validation(
    panel: &DemandPanel,
    forecaster: ForecasterKind,
    metrics: &[SimilarityMetric],
    estimator: &EstimatorSpec,
    seed: u64,
    top_k: usize,
) -> Result<MetricCrossValidation, BenchError> {
    let top_k = top_k.min(panel.n_sources());
    let mut per_metric = Vec::with_capacity(metrics.len());
    for &metric in metrics {
        let game = ForecastValueGame::new(panel.clone(), forecaster.build(), metric)?.into_game();
        let phi = if estimator.algorithm == Algorithm::Exact {
            exact_shapley_with_limit(&game, crate::valuation::DEFAULT_EXACT_LIMIT)?
        } else {
            estimator.estimate(&game, seed).phi
        };
        let sum: f64 = phi.iter().sum();
        let shares = phi
            .iter()
            .map(|p| if sum.abs() < 1e-12 { 0.0 } else { p / sum })
            .collect();
        per_metric.push(MetricShapley {
            metric: metric.name().to_owned(),
            phi,
            shares,
        });
    }

    let mut pairs = Vec::new();
    for i in 0..per_metric.len() {
        for j in i + 1..per_metric.len() {
            let a = &per_metric[i];
            let b = &per_metric[j];
            let overlap = top_k_indices(&a.shares, top_k)
                .iter()
                .filter(|idx| top_k_indices(&b.shares, top_k).contains(idx))
                .count();
            pairs.push(MetricPairStats {
                first: a.metric.clone(),
                second: b.metric.clone(),
                r_squared: r_squared(&a.shares, &b.shares),
                top_k_overlap: overlap,
            });
        }
    }

    Ok(MetricCrossValidation {
        sources: panel.sources().to_vec(),
        per_metric,
        top_k,
        pairs,
    })
}
