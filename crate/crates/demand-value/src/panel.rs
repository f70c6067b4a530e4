//! Demand panels: every source's series for one zone on a shared grid.

use thiserror::Error;

use crate::coalition::Coalition;
use crate::grid::TimeGrid;
use crate::series::{DemandSeries, SourceId, ZoneId};

#[derive(Debug, Error, PartialEq)]
pub enum PanelError {
    #[error("panel has no sources")]
    NoSources,
    #[error("series for {source_id} has {len} bins, grid has {expected}")]
    LengthMismatch {
        source_id: SourceId,
        len: usize,
        expected: usize,
    },
    #[error("series for {source_id} contains a negative or non-finite count")]
    BadCount { source_id: SourceId },
}

/// The full collection of per-source demand series for one zone, with the
/// ground truth fixed as the element-wise sum over all sources.
///
/// The source order is frozen at construction; coalition member indices refer
/// to positions in that order.
#[derive(Debug, Clone)]
pub struct DemandPanel {
    grid: TimeGrid,
    zone: Option<ZoneId>,
    sources: Vec<SourceId>,
    series: Vec<DemandSeries>,
    ground_truth: DemandSeries,
}

impl DemandPanel {
    /// Builds a panel from `(source, counts)` pairs; `zone = None` means city-wide.
    pub fn new(
        grid: TimeGrid,
        zone: Option<ZoneId>,
        series: Vec<(SourceId, Vec<f64>)>,
    ) -> Result<Self, PanelError> {
        if series.is_empty() {
            return Err(PanelError::NoSources);
        }
        let n_bins = grid.n_bins();
        let mut sources = Vec::with_capacity(series.len());
        let mut rows = Vec::with_capacity(series.len());
        let mut truth = vec![0.0; n_bins];
        for (source, counts) in series {
            if counts.len() != n_bins {
                return Err(PanelError::LengthMismatch {
                    source_id: source,
                    len: counts.len(),
                    expected: n_bins,
                });
            }
            if counts.iter().any(|c| *c < 0.0 || !c.is_finite()) {
                return Err(PanelError::BadCount { source_id: source });
            }
            for (t, c) in truth.iter_mut().zip(&counts) {
                *t += c;
            }
            rows.push(DemandSeries::new(source.clone(), counts));
            sources.push(source);
        }
        Ok(Self {
            grid,
            zone,
            sources,
            series: rows,
            ground_truth: DemandSeries::new(SourceId::new("all"), truth),
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// The zone this panel covers, or `None` for a city-wide panel.
    pub fn zone(&self) -> Option<&ZoneId> {
        self.zone.as_ref()
    }

    pub fn zone_label(&self) -> &str {
        self.zone.as_ref().map_or("city-wide", |z| z.as_str())
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[SourceId] {
        &self.sources
    }

    pub fn series(&self) -> &[DemandSeries] {
        &self.series
    }

    pub fn source_series(&self, index: usize) -> &DemandSeries {
        &self.series[index]
    }

    /// The test-set series: all sources summed.
    pub fn ground_truth(&self) -> &DemandSeries {
        &self.ground_truth
    }

    /// Ground-truth counts restricted to the control window.
    pub fn control_truth(&self) -> &[f64] {
        &self.ground_truth.counts[self.grid.control_range()]
    }

    /// Element-wise sum of the member series over the full grid; the empty
    /// coalition yields the all-zero series.
    pub fn aggregate_series(&self, coalition: &Coalition) -> DemandSeries {
        debug_assert_eq!(coalition.n_players(), self.n_sources());
        let mut sum = vec![0.0; self.grid.n_bins()];
        for &m in coalition.members() {
            for (s, c) in sum.iter_mut().zip(&self.series[m].counts) {
                *s += c;
            }
        }
        DemandSeries::new(SourceId::new("aggregate"), sum)
    }

    /// Per-source totals over the full grid.
    pub fn source_totals(&self) -> Vec<f64> {
        self.series.iter().map(DemandSeries::total).collect()
    }

    /// Grand total over all sources and bins.
    pub fn grand_total(&self) -> f64 {
        self.ground_truth.total()
    }
}
