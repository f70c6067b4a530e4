//! The prediction model: a pluggable forecaster trained on the observation
//! window and scored over the control window.
//!
//! The default implementation is a deterministic hour-of-week profile
//! predictor with a level-trend correction. The point of this crate is judging
//! the worth of datasets under a reasonable predictor, not squeezing out the
//! best possible predictor, so the interface stays open for richer models.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::TimeGrid;
use crate::series::DemandSeries;

#[derive(Debug, Error, PartialEq)]
pub enum ForecastError {
    /// All-zero training data; callers in the valuation pipeline map this to value 0.
    #[error("untrainable coalition: training series is all zero")]
    Untrainable,
    #[error("observation window has {actual} bins, need at least {needed} (two full weekly cycles)")]
    InsufficientHistory { needed: usize, actual: usize },
    #[error("bin width must divide one week for the seasonal-profile forecaster")]
    UnalignedBinWidth,
    #[error("grid has an empty control window; split the grid before forecasting")]
    EmptyControlWindow,
}

/// Predicted values over the control window, one per control bin, all finite
/// and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    pub values: Vec<f64>,
}

/// A model that learns from the observation window of a series and predicts
/// the control window. Must be deterministic for fixed input.
pub trait Forecaster: Send + Sync {
    fn name(&self) -> &'static str;

    /// Fits on `series.counts` restricted to the grid's observation window and
    /// predicts every bin of the control window, in order.
    fn fit_predict(&self, series: &DemandSeries, grid: &TimeGrid) -> Result<Forecast, ForecastError>;

    /// Validates that a grid is usable before any evaluation happens, so that
    /// inside a valuation run the only possible failure is untrainable data.
    fn check_grid(&self, grid: &TimeGrid) -> Result<(), ForecastError>;
}

/// Forecaster selector, by the names used in run configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecasterKind {
    SeasonalProfile,
}

impl ForecasterKind {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "seasonal_profile" => Some(Self::SeasonalProfile),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::SeasonalProfile => "seasonal_profile",
        }
    }

    pub fn build(&self) -> Box<dyn Forecaster> {
        match self {
            Self::SeasonalProfile => Box::new(SeasonalProfile),
        }
    }
}

/// Hour-of-week profile predictor with a level-trend correction.
///
/// Each control bin is predicted as the mean of the training values that share
/// its hour-of-week, scaled by the ratio of the last observation week's mean
/// to the whole observation window's mean. Scaling the training series by a
/// positive constant scales the prediction by the same constant, so under a
/// scale-invariant metric a coalition's value depends on the *shape* of its
/// demand, not its volume.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeasonalProfile;

impl Forecaster for SeasonalProfile {
    fn name(&self) -> &'static str {
        "seasonal_profile"
    }

    fn check_grid(&self, grid: &TimeGrid) -> Result<(), ForecastError> {
        let period = grid.bins_per_week().ok_or(ForecastError::UnalignedBinWidth)?;
        if grid.control_len() == 0 {
            return Err(ForecastError::EmptyControlWindow);
        }
        let obs_len = grid.observation_len();
        if obs_len < 2 * period {
            return Err(ForecastError::InsufficientHistory {
                needed: 2 * period,
                actual: obs_len,
            });
        }
        Ok(())
    }

    fn fit_predict(&self, series: &DemandSeries, grid: &TimeGrid) -> Result<Forecast, ForecastError> {
        self.check_grid(grid)?;
        let period = grid.bins_per_week().expect("checked by check_grid");
        let obs = grid.observation_range();
        let training = &series.counts[obs.clone()];

        let total: f64 = training.iter().sum();
        if total == 0.0 {
            return Err(ForecastError::Untrainable);
        }

        // Mean per hour-of-week slot. Slots are bin indices mod the weekly
        // period, which classifies bins by hour-of-week regardless of where
        // the grid starts.
        let mut slot_sum = vec![0.0; period];
        let mut slot_count = vec![0usize; period];
        for (offset, value) in training.iter().enumerate() {
            let slot = (obs.start + offset) % period;
            slot_sum[slot] += value;
            slot_count[slot] += 1;
        }

        let overall_mean = total / training.len() as f64;
        let last_week = &training[training.len() - period..];
        let last_week_mean = last_week.iter().sum::<f64>() / period as f64;
        let trend = last_week_mean / overall_mean;

        let values = grid
            .control_range()
            .map(|t| {
                let slot = t % period;
                let profile = if slot_count[slot] == 0 {
                    0.0
                } else {
                    slot_sum[slot] / slot_count[slot] as f64
                };
                (profile * trend).max(0.0)
            })
            .collect();
        Ok(Forecast { values })
    }
}
