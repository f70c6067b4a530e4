//! Demand series and the identifiers they hang off.

use serde::{Deserialize, Serialize};

use std::fmt;

/// Identifier of a data source (a company or an individual driver).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceId(pub String);

impl SourceId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SourceId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Identifier of a spatial zone (a district or community area). Zones are
/// opaque labels; no geometry is attached.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZoneId(pub String);

impl ZoneId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ZoneId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// An hourly (or custom-width) count series for one source on one grid.
///
/// Counts are stored as non-negative reals rather than integers so that
/// pre-normalized or fused data can flow through unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandSeries {
    pub source: SourceId,
    pub counts: Vec<f64>,
}

impl DemandSeries {
    pub fn new(source: SourceId, counts: Vec<f64>) -> Self {
        debug_assert!(counts.iter().all(|c| *c >= 0.0 && c.is_finite()));
        Self { source, counts }
    }

    pub fn zeros(source: SourceId, n_bins: usize) -> Self {
        Self {
            source,
            counts: vec![0.0; n_bins],
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Sum of all counts over the whole grid.
    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Adds another series into this one, element-wise.
    pub fn add_assign(&mut self, other: &DemandSeries) {
        assert_eq!(self.counts.len(), other.counts.len(), "series length mismatch");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}
