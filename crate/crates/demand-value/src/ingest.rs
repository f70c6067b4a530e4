//! Trip-record CSV ingestion: schema adapters, date filtering, hourly binning,
//! and top-k panel assembly.

use chrono::{DateTime, NaiveDateTime, TimeZone, Utc};
use serde::Serialize;
use thiserror::Error;

use crate::grid::TimeGrid;
use crate::panel::{DemandPanel, PanelError};
use crate::series::{SourceId, ZoneId};

use std::collections::BTreeMap;
use std::path::Path;

/// Synthetic source holding the summed remainder after a top-k cut.
pub const TAIL_SOURCE: &str = "TAIL";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("unknown schema '{0}' (expected generic, chicago or nyc)")]
    UnknownSchema(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path} is missing required column '{column}'")]
    MissingColumn { path: String, column: String },
    #[error(transparent)]
    Panel(#[from] PanelError),
}

/// One accepted ride: when it started, who reported it, where it picked up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripRecord {
    pub start_time: DateTime<Utc>,
    pub source_id: SourceId,
    pub zone_id: ZoneId,
}

/// Which column identifies the source in the Chicago schema: the company (for
/// wholesale runs) or the individual taxi (for retail runs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceColumn {
    Company,
    Driver,
}

impl SourceColumn {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "company" => Some(Self::Company),
            "driver" => Some(Self::Driver),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Company => "company",
            Self::Driver => "driver",
        }
    }
}

/// Column mapping for one input format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// Header `start_time,source_id,zone_id` with ISO 8601 timestamps.
    Generic,
    /// The Chicago trip log: "Trip Start Timestamp" (`MM/DD/YYYY hh:mm:ss AM`),
    /// "Company" or "Taxi ID" per `source_column`, "Pickup Community Area".
    Chicago { source_column: SourceColumn },
    /// NYC trip records: pickup datetime, license/base identifier, pickup
    /// location id (column names vary per feed, all common spellings accepted).
    Nyc,
}

impl Schema {
    pub fn from_name(name: &str, source_column: SourceColumn) -> Result<Self, IngestError> {
        match name {
            "generic" => Ok(Self::Generic),
            "chicago" => Ok(Self::Chicago { source_column }),
            "nyc" => Ok(Self::Nyc),
            other => Err(IngestError::UnknownSchema(other.to_owned())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Generic => "generic",
            Self::Chicago { .. } => "chicago",
            Self::Nyc => "nyc",
        }
    }

    fn time_candidates(&self) -> &'static [&'static str] {
        match self {
            Self::Generic => &["start_time"],
            Self::Chicago { .. } => &["Trip Start Timestamp"],
            Self::Nyc => &["tpep_pickup_datetime", "lpep_pickup_datetime", "pickup_datetime"],
        }
    }

    fn source_candidates(&self) -> &'static [&'static str] {
        match self {
            Self::Generic => &["source_id"],
            Self::Chicago {
                source_column: SourceColumn::Company,
            } => &["Company"],
            Self::Chicago {
                source_column: SourceColumn::Driver,
            } => &["Taxi ID"],
            Self::Nyc => &["hvfhs_license_num", "dispatching_base_num", "VendorID", "vendor_id"],
        }
    }

    fn zone_candidates(&self) -> &'static [&'static str] {
        match self {
            Self::Generic => &["zone_id"],
            Self::Chicago { .. } => &["Pickup Community Area"],
            Self::Nyc => &["PULocationID", "PUlocationID", "pulocationid"],
        }
    }

    fn parse_time(&self, raw: &str) -> Option<DateTime<Utc>> {
        let raw = raw.trim();
        let naive = match self {
            // The Chicago log reports local civil time with an AM/PM marker.
            // It is taken as-is (no DST correction): only bin alignment
            // matters for valuation, not absolute UTC truth.
            Self::Chicago { .. } => NaiveDateTime::parse_from_str(raw, "%m/%d/%Y %I:%M:%S %p").ok()?,
            Self::Nyc => NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S").ok()?,
            Self::Generic => {
                if let Ok(instant) = DateTime::parse_from_rfc3339(raw) {
                    return Some(instant.with_timezone(&Utc));
                }
                NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S")
                    .or_else(|_| NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S"))
                    .ok()?
            }
        };
        Some(Utc.from_utc_datetime(&naive))
    }
}

/// Accepted/dropped row counts for one load, by drop reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub total_rows: u64,
    pub accepted: u64,
    pub dropped_out_of_range: u64,
    pub dropped_bad_timestamp: u64,
    pub dropped_missing_source: u64,
    pub dropped_missing_zone: u64,
    pub dropped_malformed: u64,
}

/// Records plus the load report describing what was kept and what was dropped.
#[derive(Debug)]
pub struct TripLoad {
    pub records: Vec<TripRecord>,
    pub report: LoadReport,
}

fn find_column(
    headers: &csv::StringRecord,
    candidates: &[&str],
    path: &str,
) -> Result<usize, IngestError> {
    for candidate in candidates {
        if let Some(idx) = headers.iter().position(|h| h.trim() == *candidate) {
            return Ok(idx);
        }
    }
    Err(IngestError::MissingColumn {
        path: path.to_owned(),
        column: candidates[0].to_owned(),
    })
}

/// Loads records whose start time falls in `[range.0, range.1)`. Rows with
/// unparseable timestamps or missing source/zone fields are dropped and
/// counted in the report, never fatal.
pub fn load_trips(
    path: impl AsRef<Path>,
    schema: Schema,
    range: (DateTime<Utc>, DateTime<Utc>),
) -> Result<TripLoad, IngestError> {
    let path_label = path.as_ref().display().to_string();
    let file = std::fs::File::open(path.as_ref()).map_err(|source| IngestError::Io {
        path: path_label.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|source| IngestError::Csv {
            path: path_label.clone(),
            source,
        })?
        .clone();
    let time_idx = find_column(&headers, schema.time_candidates(), &path_label)?;
    let source_idx = find_column(&headers, schema.source_candidates(), &path_label)?;
    let zone_idx = find_column(&headers, schema.zone_candidates(), &path_label)?;

    let mut report = LoadReport::default();
    let mut records = Vec::new();
    for row in reader.records() {
        report.total_rows += 1;
        let row = match row {
            Ok(row) => row,
            Err(_) => {
                report.dropped_malformed += 1;
                continue;
            }
        };
        let (Some(time_raw), Some(source_raw), Some(zone_raw)) =
            (row.get(time_idx), row.get(source_idx), row.get(zone_idx))
        else {
            report.dropped_malformed += 1;
            continue;
        };
        let Some(start_time) = schema.parse_time(time_raw) else {
            report.dropped_bad_timestamp += 1;
            continue;
        };
        let source_raw = source_raw.trim();
        if source_raw.is_empty() {
            report.dropped_missing_source += 1;
            continue;
        }
        let zone_raw = zone_raw.trim();
        if zone_raw.is_empty() {
            report.dropped_missing_zone += 1;
            continue;
        }
        if start_time < range.0 || start_time >= range.1 {
            report.dropped_out_of_range += 1;
            continue;
        }
        report.accepted += 1;
        records.push(TripRecord {
            start_time,
            source_id: SourceId::new(source_raw),
            zone_id: ZoneId::new(zone_raw),
        });
    }
    Ok(TripLoad { records, report })
}

/// Bins each trip into the grid bin containing its start time, one series per
/// source. Trips outside `zone_filter` (when set) or outside the grid are
/// excluded; sources with no surviving trips are omitted entirely.
pub fn bin_demand(
    trips: &[TripRecord],
    grid: &TimeGrid,
    zone_filter: Option<&ZoneId>,
) -> BTreeMap<SourceId, Vec<f64>> {
    let mut by_source: BTreeMap<SourceId, Vec<f64>> = BTreeMap::new();
    for trip in trips {
        if let Some(zone) = zone_filter {
            if &trip.zone_id != zone {
                continue;
            }
        }
        let Some(bin) = grid.bin_index(trip.start_time) else {
            continue;
        };
        by_source
            .entry(trip.source_id.clone())
            .or_insert_with(|| vec![0.0; grid.n_bins()])
            [bin] += 1.0;
    }
    by_source
}

/// All zones present in a batch of trips, each once, in sorted order.
pub fn distinct_zones(trips: &[TripRecord]) -> Vec<ZoneId> {
    let mut zones: Vec<ZoneId> = trips.iter().map(|t| t.zone_id.clone()).collect();
    zones.sort_unstable();
    zones.dedup();
    zones
}

/// Keeps the `k` sources with the largest totals as individuals and sums all
/// remaining sources into one synthetic tail source. Ties on total break by
/// lexicographic source id; with at most `k` sources no tail is created.
pub fn top_k_with_tail(
    series_by_source: BTreeMap<SourceId, Vec<f64>>,
    k: usize,
) -> Vec<(SourceId, Vec<f64>)> {
    assert!(k >= 1, "top-k needs k >= 1");
    let mut entries: Vec<(SourceId, Vec<f64>)> = series_by_source.into_iter().collect();
    entries.sort_by(|(id_a, counts_a), (id_b, counts_b)| {
        let total_a: f64 = counts_a.iter().sum();
        let total_b: f64 = counts_b.iter().sum();
        total_b.partial_cmp(&total_a).unwrap().then_with(|| id_a.cmp(id_b))
    });
    if entries.len() <= k {
        return entries;
    }
    let tail_members = entries.split_off(k);
    let mut tail = vec![0.0; tail_members[0].1.len()];
    for (_, counts) in &tail_members {
        for (t, c) in tail.iter_mut().zip(counts) {
            *t += c;
        }
    }
    entries.push((SourceId::new(TAIL_SOURCE), tail));
    entries
}

/// Assembles a panel from binned series, optionally cutting to top-k + tail.
pub fn build_panel(
    grid: TimeGrid,
    zone: Option<ZoneId>,
    series_by_source: BTreeMap<SourceId, Vec<f64>>,
    top_k: Option<usize>,
) -> Result<DemandPanel, IngestError> {
    let series = match top_k {
        Some(k) => top_k_with_tail(series_by_source, k),
        None => series_by_source.into_iter().collect(),
    };
    Ok(DemandPanel::new(grid, zone, series)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file.flush().unwrap();
        file
    }

    fn april_2019() -> (DateTime<Utc>, DateTime<Utc>) {
        (
            Utc.with_ymd_and_hms(2019, 4, 1, 0, 0, 0).unwrap(),
            Utc.with_ymd_and_hms(2019, 5, 1, 0, 0, 0).unwrap(),
        )
    }

    #[test]
    fn generic_schema_parses_plain_rows() {
        let file = write_csv(
            "start_time,source_id,zone_id\n\
             2019-04-15T10:30:00,alpha,8\n\
             2019-04-15T11:00:00,beta,8\n\
             2019-04-16T09:15:00,alpha,11\n",
        );
        let load = load_trips(file.path(), Schema::Generic, april_2019()).unwrap();
        assert_eq!(load.records.len(), 3);
        assert_eq!(load.report.accepted, 3);
        assert_eq!(load.report.total_rows, 3);
        assert_eq!(load.records[0].source_id, SourceId::new("alpha"));
        assert_eq!(load.records[0].zone_id, ZoneId::new("8"));
    }

    #[test]
    fn malformed_timestamps_are_dropped_and_counted() {
        let file = write_csv(
            "start_time,source_id,zone_id\n\
             2019-04-15T10:30:00,alpha,8\n\
             not-a-time,beta,8\n\
             2019-04-16T09:15:00,alpha,11\n",
        );
        let load = load_trips(file.path(), Schema::Generic, april_2019()).unwrap();
        assert_eq!(load.records.len(), 2);
        assert_eq!(load.report.dropped_bad_timestamp, 1);
    }

    #[test]
    fn chicago_schema_maps_the_city_columns() {
        let file = write_csv(
            "Trip ID,Taxi ID,Trip Start Timestamp,Company,Pickup Community Area\n\
             t1,cab-9,04/15/2019 10:30:00 AM,Flash Cab,8\n\
             t2,cab-9,04/15/2019 10:45:00 PM,Flash Cab,8\n\
             t3,cab-3,04/16/2019 01:00:00 AM,Sun Taxi,32\n\
             t4,cab-4,04/17/2019 12:10:00 PM,,32\n\
             t5,cab-5,04/18/2019 12:10:00 AM,Sun Taxi,\n",
        );
        let company = load_trips(
            file.path(),
            Schema::Chicago {
                source_column: SourceColumn::Company,
            },
            april_2019(),
        )
        .unwrap();
        assert_eq!(company.records.len(), 3);
        assert_eq!(company.report.dropped_missing_source, 1);
        assert_eq!(company.report.dropped_missing_zone, 1);
        assert_eq!(company.records[0].source_id, SourceId::new("Flash Cab"));
        // 10:30 AM parses to hour 10; 10:45 PM to hour 22; 1:00 AM to hour 1.
        assert_eq!(company.records[0].start_time.format("%H:%M").to_string(), "10:30");
        assert_eq!(company.records[1].start_time.format("%H:%M").to_string(), "22:45");
        assert_eq!(company.records[2].start_time.format("%H:%M").to_string(), "01:00");

        let drivers = load_trips(
            file.path(),
            Schema::Chicago {
                source_column: SourceColumn::Driver,
            },
            april_2019(),
        )
        .unwrap();
        assert_eq!(drivers.records.len(), 4, "driver column is present on the no-company row");
        assert_eq!(drivers.records[0].source_id, SourceId::new("cab-9"));
        // Noon is 12 PM, midnight is 12 AM.
        assert_eq!(drivers.records[3].start_time.format("%H:%M").to_string(), "12:10");
        let midnight = Schema::Chicago {
            source_column: SourceColumn::Driver,
        }
        .parse_time("04/18/2019 12:05:00 AM")
        .unwrap();
        assert_eq!(midnight.format("%H:%M").to_string(), "00:05");
    }

    #[test]
    fn nyc_schema_accepts_common_column_spellings() {
        let file = write_csv(
            "VendorID,tpep_pickup_datetime,PULocationID\n\
             V1,2019-04-02 08:00:00,142\n\
             V2,2019-04-02 08:30:00,142\n",
        );
        let load = load_trips(file.path(), Schema::Nyc, april_2019()).unwrap();
        assert_eq!(load.records.len(), 2);
        assert_eq!(load.records[0].zone_id, ZoneId::new("142"));
    }

    #[test]
    fn date_range_is_half_open() {
        let file = write_csv(
            "start_time,source_id,zone_id\n\
             2019-03-31T23:59:59,alpha,1\n\
             2019-04-01T00:00:00,alpha,1\n\
             2019-04-30T23:59:59,alpha,1\n\
             2019-05-01T00:00:00,alpha,1\n",
        );
        let load = load_trips(file.path(), Schema::Generic, april_2019()).unwrap();
        assert_eq!(load.report.accepted, 2);
        assert_eq!(load.report.dropped_out_of_range, 2);
    }

    #[test]
    fn unknown_schema_name_is_a_config_error() {
        let err = Schema::from_name("seattle", SourceColumn::Company).unwrap_err();
        assert!(matches!(err, IngestError::UnknownSchema(name) if name == "seattle"));
    }

    #[test]
    fn missing_column_is_reported_by_name() {
        let file = write_csv("when,who,where\n2019-04-15T10:30:00,a,b\n");
        let err = load_trips(file.path(), Schema::Generic, april_2019()).unwrap_err();
        assert!(matches!(err, IngestError::MissingColumn { column, .. } if column == "start_time"));
    }

    fn grid_for_day() -> TimeGrid {
        TimeGrid::hourly(Utc.with_ymd_and_hms(2019, 4, 15, 0, 0, 0).unwrap(), 24).unwrap()
    }

    fn trip(h: u32, m: u32, source: &str, zone: &str) -> TripRecord {
        TripRecord {
            start_time: Utc.with_ymd_and_hms(2019, 4, 15, h, m, 0).unwrap(),
            source_id: SourceId::new(source),
            zone_id: ZoneId::new(zone),
        }
    }

    #[test]
    fn trips_land_in_their_hour_bin() {
        let binned = bin_demand(&[trip(10, 30, "a", "1")], &grid_for_day(), None);
        let series = &binned[&SourceId::new("a")];
        assert_eq!(series[10], 1.0);
        assert_eq!(series.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn same_hour_trips_accumulate() {
        let trips = [trip(10, 5, "a", "1"), trip(10, 55, "a", "1")];
        let binned = bin_demand(&trips, &grid_for_day(), None);
        assert_eq!(binned[&SourceId::new("a")][10], 2.0);
    }

    #[test]
    fn zone_filter_keeps_only_matching_trips() {
        let trips = [
            trip(9, 0, "a", "1"),
            trip(10, 0, "a", "2"),
            trip(11, 0, "b", "2"),
        ];
        let zone = ZoneId::new("2");
        let binned = bin_demand(&trips, &grid_for_day(), Some(&zone));
        assert_eq!(binned.len(), 2);
        assert_eq!(binned[&SourceId::new("a")][10], 1.0);
        assert_eq!(binned[&SourceId::new("b")][11], 1.0);
        assert_eq!(binned[&SourceId::new("a")].iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn ride_count_is_conserved_through_binning() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let trips: Vec<TripRecord> = (0..500)
            .map(|_| {
                trip(
                    rng.gen_range(0..24),
                    rng.gen_range(0..60),
                    ["a", "b", "c"][rng.gen_range(0..3)],
                    ["1", "2"][rng.gen_range(0..2)],
                )
            })
            .collect();
        let binned = bin_demand(&trips, &grid_for_day(), None);
        let total: f64 = binned.values().map(|s| s.iter().sum::<f64>()).sum();
        assert_eq!(total, 500.0);
    }

    #[test]
    fn top_k_sums_the_remainder_into_a_tail() {
        let mut map = BTreeMap::new();
        map.insert(SourceId::new("A"), vec![10.0]);
        map.insert(SourceId::new("B"), vec![8.0]);
        map.insert(SourceId::new("C"), vec![2.0]);
        map.insert(SourceId::new("D"), vec![1.0]);
        let cut = top_k_with_tail(map, 2);
        let ids: Vec<&str> = cut.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(ids, vec!["A", "B", TAIL_SOURCE]);
        assert_eq!(cut[2].1, vec![3.0]);
    }

    #[test]
    fn no_tail_when_everyone_fits() {
        let mut map = BTreeMap::new();
        map.insert(SourceId::new("A"), vec![1.0]);
        map.insert(SourceId::new("B"), vec![2.0]);
        let cut = top_k_with_tail(map, 5);
        let ids: Vec<&str> = cut.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(ids, vec!["B", "A"]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let mut map = BTreeMap::new();
        map.insert(SourceId::new("B"), vec![5.0]);
        map.insert(SourceId::new("A"), vec![5.0]);
        map.insert(SourceId::new("C"), vec![1.0]);
        let cut = top_k_with_tail(map, 1);
        let ids: Vec<&str> = cut.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(ids, vec!["A", TAIL_SOURCE]);
        assert_eq!(cut[1].1, vec![6.0]);
    }

    #[test]
    fn top_k_preserves_the_panel_total() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let mut map = BTreeMap::new();
        for i in 0..12 {
            let counts: Vec<f64> = (0..6).map(|_| rng.gen_range(0..30) as f64).collect();
            map.insert(SourceId::new(format!("s{i:02}")), counts);
        }
        let before: f64 = map.values().flatten().sum();
        let cut = top_k_with_tail(map, 4);
        let after: f64 = cut.iter().flat_map(|(_, c)| c).sum();
        assert_eq!(before, after);
        assert_eq!(cut.len(), 5);
    }

    #[test]
    fn loading_and_binning_twice_is_bit_identical() {
        let file = write_csv(
            "start_time,source_id,zone_id\n\
             2019-04-15T10:30:00,alpha,8\n\
             2019-04-15T10:40:00,beta,8\n\
             2019-04-15T12:00:00,alpha,9\n",
        );
        let grid = grid_for_day();
        let a = bin_demand(
            &load_trips(file.path(), Schema::Generic, april_2019()).unwrap().records,
            &grid,
            None,
        );
        let b = bin_demand(
            &load_trips(file.path(), Schema::Generic, april_2019()).unwrap().records,
            &grid,
            None,
        );
        assert_eq!(a, b);
    }
}
