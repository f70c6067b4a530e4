//! Benefit-of-cooperation analysis: is pooling worth it in a zone, and for
//! how many sources?

use serde::Serialize;

use crate::bench::evaluate::BenchError;
use crate::coalition::Coalition;
use crate::forecast::ForecasterKind;
use crate::panel::DemandPanel;
use crate::similarity::SimilarityMetric;
use crate::valuation::ForecastValueGame;

/// Zones whose all-sources accuracy falls below this are flagged as not
/// forecastable at all, cooperation or no cooperation.
pub const DEFAULT_ACCURACY_FLOOR: f64 = 0.60;

#[derive(Debug, Clone, Serialize)]
pub struct WillingCount {
    pub threshold: f64,
    /// Sources whose accuracy improves by at least `threshold` when moving
    /// from their own data to everyone's.
    pub count: usize,
}

/// Per-zone cooperation summary: the all-sources value, each source's solo
/// value, their difference (the benefit), and willing-to-cooperate counts.
#[derive(Debug, Clone, Serialize)]
pub struct CooperationAnalysis {
    pub zone: String,
    pub n_sources: usize,
    pub v_all: f64,
    pub singleton_values: Vec<f64>,
    /// `v_all` minus the mean singleton value.
    pub benefit: f64,
    /// Whether `v_all` clears the accuracy floor; the benefit is only
    /// meaningful for zones that are forecastable in the first place.
    pub sufficient_accuracy: bool,
    pub willing: Vec<WillingCount>,
}

/// Computes the cooperation analysis for each panel with `n + 1` evaluations
/// per zone (the full coalition plus every singleton).
pub fn cooperation_benefit(
    panels: &[DemandPanel],
    forecaster: ForecasterKind,
    metric: SimilarityMetric,
    thresholds: &[f64],
    accuracy_floor: f64,
) -> Result<Vec<CooperationAnalysis>, BenchError> {
    panels
        .iter()
        .map(|panel| analyze_zone(panel, forecaster, metric, thresholds, accuracy_floor))
        .collect()
}

fn analyze_zone(
    panel: &DemandPanel,
    forecaster: ForecasterKind,
    metric: SimilarityMetric,
    thresholds: &[f64],
    accuracy_floor: f64,
) -> Result<CooperationAnalysis, BenchError> {
    let n = panel.n_sources();
    if n < 2 {
        return Err(BenchError::TooFewSources {
            zone: panel.zone_label().to_owned(),
        });
    }
    let zone = panel.zone_label().to_owned();
    let game = ForecastValueGame::new(panel.clone(), forecaster.build(), metric)?.into_game();
    let v_all = game.value(&Coalition::full(n));
    let singleton_values: Vec<f64> = (0..n)
        .map(|i| game.value(&Coalition::new([i], n).expect("index in range")))
        .collect();
    let mean_single = singleton_values.iter().sum::<f64>() / n as f64;
    let willing = thresholds
        .iter()
        .map(|&threshold| WillingCount {
            threshold,
            count: singleton_values.iter().filter(|&&v| v_all - v >= threshold).count(),
        })
        .collect();
    Ok(CooperationAnalysis {
        zone,
        n_sources: n,
        v_all,
        benefit: v_all - mean_single,
        singleton_values,
        sufficient_accuracy: v_all >= accuracy_floor,
        willing,
    })
}
