//! Time grids: hourly (or custom-width) bins with an observation/control split.

use chrono::{DateTime, Duration, Utc};
use thiserror::Error;

use std::ops::Range;

/// Number of seconds in one week, the seasonal cycle the default forecaster assumes.
pub const WEEK_SECONDS: i64 = 7 * 24 * 3600;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("control start {0} does not align to a bin boundary")]
    MisalignedBoundary(DateTime<Utc>),
    #[error("control start {0} must lie strictly inside the grid")]
    BoundaryOutOfRange(DateTime<Utc>),
    #[error("bin width must be a positive whole number of seconds")]
    BadBinWidth,
    #[error("grid must contain at least one bin")]
    Empty,
}

/// A uniform time grid of `n_bins` bins of width `bin_width` starting at `start`,
/// split into an observation window (training) followed by a control window (test).
///
/// The two windows are contiguous half-open bin-index ranges: the observation
/// window ends exactly where the control window begins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeGrid {
    start: DateTime<Utc>,
    bin_width: Duration,
    n_bins: usize,
    observation: Range<usize>,
    control: Range<usize>,
}

impl TimeGrid {
    /// Builds a grid with the whole span assigned to the observation window and
    /// an empty control window; use [`TimeGrid::split_at`] to carve out the
    /// control window before forecasting.
    pub fn new(
        start: DateTime<Utc>,
        bin_width: Duration,
        n_bins: usize,
    ) -> Result<Self, GridError> {
        if bin_width <= Duration::zero() || bin_width.num_seconds() * 1000 != bin_width.num_milliseconds() {
            return Err(GridError::BadBinWidth);
        }
        if n_bins == 0 {
            return Err(GridError::Empty);
        }
        Ok(Self {
            start,
            bin_width,
            n_bins,
            observation: 0..n_bins,
            control: n_bins..n_bins,
        })
    }

    /// Hourly grid, the default bin width used throughout.
    pub fn hourly(start: DateTime<Utc>, n_bins: usize) -> Result<Self, GridError> {
        Self::new(start, Duration::hours(1), n_bins)
    }

    /// Returns a copy of the grid with the observation window ending (and the
    /// control window beginning) at `control_start`.
    ///
    /// `control_start` must fall on a bin boundary strictly inside the grid, so
    /// that both windows are non-empty.
    pub fn split_at(&self, control_start: DateTime<Utc>) -> Result<Self, GridError> {
        let offset = control_start - self.start;
        let width = self.bin_width.num_seconds();
        let secs = offset.num_seconds();
        if offset != Duration::seconds(secs) || secs % width != 0 {
            return Err(GridError::MisalignedBoundary(control_start));
        }
        let idx = secs / width;
        if idx <= 0 || idx >= self.n_bins as i64 {
            return Err(GridError::BoundaryOutOfRange(control_start));
        }
        let idx = idx as usize;
        let mut grid = self.clone();
        grid.observation = 0..idx;
        grid.control = idx..self.n_bins;
        Ok(grid)
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    pub fn bin_width(&self) -> Duration {
        self.bin_width
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    /// Half-open bin-index range of the observation (training) window.
    pub fn observation_range(&self) -> Range<usize> {
        self.observation.clone()
    }

    /// Half-open bin-index range of the control (test) window.
    pub fn control_range(&self) -> Range<usize> {
        self.control.clone()
    }

    pub fn observation_len(&self) -> usize {
        self.observation.len()
    }

    pub fn control_len(&self) -> usize {
        self.control.len()
    }

    /// Index of the bin containing `instant`, or `None` when it falls outside the grid.
    pub fn bin_index(&self, instant: DateTime<Utc>) -> Option<usize> {
        let offset = instant - self.start;
        if offset < Duration::zero() {
            return None;
        }
        let idx = offset.num_seconds() / self.bin_width.num_seconds();
        if idx < self.n_bins as i64 {
            Some(idx as usize)
        } else {
            None
        }
    }

    /// Start instant of bin `idx`.
    pub fn bin_start(&self, idx: usize) -> DateTime<Utc> {
        self.start + self.bin_width * idx as i32
    }

    /// End instant of the grid (exclusive).
    pub fn end(&self) -> DateTime<Utc> {
        self.start + self.bin_width * self.n_bins as i32
    }

    /// Number of bins in one week, or `None` when the bin width does not divide a week.
    pub fn bins_per_week(&self) -> Option<usize> {
        let width = self.bin_width.num_seconds();
        if WEEK_SECONDS % width == 0 {
            Some((WEEK_SECONDS / width) as usize)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn at(y: i32, m: u32, d: u32, h: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(y, m, d, h, 0, 0).unwrap()
    }

    #[test]
    fn split_four_week_grid_at_week_three() {
        let grid = TimeGrid::hourly(at(2019, 4, 1, 0), 4 * 168).unwrap();
        let split = grid.split_at(at(2019, 4, 15, 0)).unwrap();
        assert_eq!(split.observation_len(), 336);
        assert_eq!(split.control_len(), 336);
        assert_eq!(split.observation_range().end, split.control_range().start);
    }

    #[test]
    fn split_at_grid_start_is_rejected() {
        let grid = TimeGrid::hourly(at(2019, 4, 1, 0), 168).unwrap();
        let err = grid.split_at(at(2019, 4, 1, 0)).unwrap_err();
        assert_eq!(err, GridError::BoundaryOutOfRange(at(2019, 4, 1, 0)));
    }

    #[test]
    fn split_off_boundary_is_rejected() {
        let grid = TimeGrid::hourly(at(2019, 4, 1, 0), 168).unwrap();
        let odd = Utc.with_ymd_and_hms(2019, 4, 2, 0, 30, 0).unwrap();
        assert_eq!(grid.split_at(odd).unwrap_err(), GridError::MisalignedBoundary(odd));
    }

    #[test]
    fn six_week_grid_split_into_four_plus_two() {
        // Six observed weeks from Mar 4, control from Apr 15 through Apr 28.
        let grid = TimeGrid::hourly(at(2019, 3, 4, 0), 8 * 168).unwrap();
        let split = grid.split_at(at(2019, 4, 15, 0)).unwrap();
        assert_eq!(split.observation_len(), 1008);
        assert_eq!(split.control_len(), 336);
    }

    #[test]
    fn bin_index_floors_into_bins() {
        let grid = TimeGrid::hourly(at(2019, 4, 15, 0), 24).unwrap();
        let instant = Utc.with_ymd_and_hms(2019, 4, 15, 10, 30, 0).unwrap();
        assert_eq!(grid.bin_index(instant), Some(10));
        assert_eq!(grid.bin_index(at(2019, 4, 14, 23)), None);
        assert_eq!(grid.bin_index(at(2019, 4, 16, 0)), None);
    }

    #[test]
    fn bins_per_week_requires_divisibility() {
        let grid = TimeGrid::hourly(at(2019, 4, 1, 0), 168).unwrap();
        assert_eq!(grid.bins_per_week(), Some(168));
        let odd = TimeGrid::new(at(2019, 4, 1, 0), Duration::minutes(25), 10).unwrap();
        assert_eq!(odd.bins_per_week(), None);
    }
}
