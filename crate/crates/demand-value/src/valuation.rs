//! The forecasting coalition game and the exact value-assignment methods.
//!
//! A coalition's value is the accuracy of a forecaster trained on the
//! coalition's aggregate demand, scored against the all-sources ground truth
//! over the control window. On top of that game: exact Shapley values by
//! subset enumeration, the leave-one-out heuristic, and volume shares.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coalition::Coalition;
use crate::forecast::{ForecastError, Forecaster};
use crate::game::{CharacteristicFunction, ValuationGame};
use crate::panel::DemandPanel;
use crate::series::SourceId;
use crate::similarity::SimilarityMetric;

use std::io::Write;

/// Default player-count ceiling for exact subset enumeration (2^20 evaluations).
pub const DEFAULT_EXACT_LIMIT: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum ValuationError {
    #[error("exact Shapley over {n} players exceeds the limit of {limit}; use an approximation (mc/rs/ss)")]
    ExactLimitExceeded { n: usize, limit: usize },
    #[error("panel ground truth is all zero over the control window")]
    ZeroGroundTruth,
    #[error("forecaster cannot run on this grid: {0}")]
    BadGrid(ForecastError),
}

/// The coalition value function of the forecasting pipeline.
///
/// `value(K)` aggregates the member series, fits the forecaster on the
/// observation window, and scores the prediction against the ground truth
/// over the control window. The empty coalition and coalitions whose training
/// data is all zero are worth 0.
pub struct ForecastValueGame {
    panel: DemandPanel,
    forecaster: Box<dyn Forecaster>,
    metric: SimilarityMetric,
}

impl ForecastValueGame {
    pub fn new(
        panel: DemandPanel,
        forecaster: Box<dyn Forecaster>,
        metric: SimilarityMetric,
    ) -> Result<Self, ValuationError> {
        forecaster.check_grid(panel.grid()).map_err(ValuationError::BadGrid)?;
        if panel.control_truth().iter().all(|v| *v == 0.0) {
            return Err(ValuationError::ZeroGroundTruth);
        }
        Ok(Self {
            panel,
            forecaster,
            metric,
        })
    }

    pub fn panel(&self) -> &DemandPanel {
        &self.panel
    }

    pub fn metric(&self) -> SimilarityMetric {
        self.metric
    }

    /// Wraps the game in a memoizing [`ValuationGame`].
    pub fn into_game(self) -> ValuationGame {
        ValuationGame::new(self)
    }
}

impl CharacteristicFunction for ForecastValueGame {
    fn n_players(&self) -> usize {
        self.panel.n_sources()
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        if coalition.is_empty() {
            return 0.0;
        }
        let aggregate = self.panel.aggregate_series(coalition);
        match self.forecaster.fit_predict(&aggregate, self.panel.grid()) {
            Ok(forecast) => self.metric.score(self.panel.control_truth(), &forecast.values),
            Err(ForecastError::Untrainable) => 0.0,
            // check_grid ran at construction; anything else is a bug.
            Err(other) => unreachable!("forecaster failed on a validated grid: {other}"),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Exact Shapley values by subset enumeration with the shared memo cache:
/// `phi_i = sum over K not containing i of w(|K|) * (v(K + i) - v(K))` with
/// `w(k) = k! (n-k-1)! / n! = 1 / (n * C(n-1, k))`.
///
/// All `2^n` coalition values are evaluated (in parallel when a rayon pool is
/// available) and the marginal differences are then accumulated in ascending
/// mask order, so results are bit-identical across worker counts.
pub fn exact_shapley(game: &ValuationGame) -> Result<Vec<f64>, ValuationError> {
    exact_shapley_with_limit(game, DEFAULT_EXACT_LIMIT)
}

pub fn exact_shapley_with_limit(
    game: &ValuationGame,
    limit: usize,
) -> Result<Vec<f64>, ValuationError> {
    let n = game.n_players();
    if n > limit || n > 64 {
        return Err(ValuationError::ExactLimitExceeded { n, limit });
    }
    let n_masks: u64 = 1 << n;
    let values: Vec<f64> = (0..n_masks)
        .into_par_iter()
        .map(|mask| game.value(&Coalition::from_mask(mask, n)))
        .collect();

    let weights: Vec<f64> = (0..n).map(|k| 1.0 / (n as f64 * binomial(n - 1, k))).collect();
    let mut phi = vec![0.0; n];
    for mask in 0..n_masks {
        let size = mask.count_ones() as usize;
        let v_base = values[mask as usize];
        for (i, phi_i) in phi.iter_mut().enumerate() {
            if mask >> i & 1 == 0 {
                let v_with = values[(mask | 1 << i) as usize];
                *phi_i += weights[size] * (v_with - v_base);
            }
        }
    }
    Ok(phi)
}

/// Leave-one-out values: `v(N) - v(N without i)` for every player. Exactly
/// `n + 1` distinct evaluations; negative values are preserved.
pub fn leave_one_out(game: &ValuationGame) -> Vec<f64> {
    let n = game.n_players();
    let full = Coalition::full(n);
    let v_full = game.value(&full);
    (0..n)
        .map(|i| v_full - game.value(&full.without_member(i)))
        .collect()
}

/// Per-source share of the total data volume (ride counts) over the full grid.
pub fn volume_shares(panel: &DemandPanel) -> Vec<f64> {
    let totals = panel.source_totals();
    let grand: f64 = totals.iter().sum();
    assert!(grand > 0.0, "volume_shares: panel has no rides");
    totals.into_iter().map(|t| t / grand).collect()
}

/// How the values in a [`ValueReport`] were produced.
#[derive(Debug, Clone, Serialize)]
pub struct MethodMeta {
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub metric: String,
    pub forecaster: String,
}

/// One valued source: Shapley estimate (raw and as a share of the sum),
/// leave-one-out value, and volume share.
#[derive(Debug, Clone, Serialize)]
pub struct ValueRow {
    pub source: SourceId,
    pub shapley: f64,
    pub shapley_share: f64,
    pub loo: f64,
    pub volume_share: f64,
    pub rides_pct: f64,
}

/// Per-source value assignments for one panel, plus the run metadata needed
/// to reproduce them.
#[derive(Debug, Clone, Serialize)]
pub struct ValueReport {
    pub zone: String,
    pub v_full: f64,
    pub evaluations: u64,
    pub method: MethodMeta,
    pub rows: Vec<ValueRow>,
}

impl ValueReport {
    /// Assembles a report from per-source vectors (all indexed like the panel
    /// sources). Shapley values are reported raw and as shares of their sum,
    /// never clipped: negative values are meaningful.
    pub fn assemble(
        panel: &DemandPanel,
        shapley: &[f64],
        loo: &[f64],
        v_full: f64,
        evaluations: u64,
        method: MethodMeta,
    ) -> Self {
        let volume = volume_shares(panel);
        let shapley_sum: f64 = shapley.iter().sum();
        let rows = panel
            .sources()
            .iter()
            .enumerate()
            .map(|(i, source)| ValueRow {
                source: source.clone(),
                shapley: shapley[i],
                shapley_share: if shapley_sum.abs() < 1e-12 {
                    0.0
                } else {
                    shapley[i] / shapley_sum
                },
                loo: loo[i],
                volume_share: volume[i],
                rides_pct: 100.0 * volume[i],
            })
            .collect();
        Self {
            zone: panel.zone_label().to_owned(),
            v_full,
            evaluations,
            method,
            rows,
        }
    }

    /// One CSV row per source.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "source,shapley,shapley_share,loo,volume_share,rides_pct")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                row.source, row.shapley, row.shapley_share, row.loo, row.volume_share, row.rides_pct
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
