//! Reproducible runs: a flat config, one function per subcommand, atomic
//! CSV/JSON outputs, and a manifest that doubles as a re-runnable config.

use chrono::{DateTime, Duration, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{Algorithm, EstimatorSpec};
use crate::bench::coop::cooperation_benefit;
use crate::bench::cross_metric::metric_cross_validation;
use crate::bench::evaluate::{evaluate_approximator, ApproximatorEvaluation, BenchError};
use crate::bench::retail::{accuracy_probability_curve, pims_select};
use crate::bench::synthetic::{
    AdditiveGame, ComplementaryPairGame, RandomGame, RandomMonotoneGame, SaturatingGame,
};
use crate::coalition::Coalition;
use crate::forecast::ForecasterKind;
use crate::game::ValuationGame;
use crate::grid::{GridError, TimeGrid};
use crate::ingest::{
    bin_demand, build_panel, distinct_zones, load_trips, LoadReport, Schema, SourceColumn,
};
use crate::panel::DemandPanel;
use crate::series::ZoneId;
use crate::similarity::SimilarityMetric;
use crate::valuation::{
    exact_shapley_with_limit, leave_one_out, ForecastValueGame, MethodMeta, ValuationError,
    ValueReport,
};

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Infeasible(String),
}

impl RunError {
    /// Exit codes: 2 config error, 3 data error, 4 infeasible request.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Data(_) => 3,
            RunError::Infeasible(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Data(_) => "data",
            RunError::Infeasible(_) => "infeasible",
        }
    }

    /// Machine-readable form printed to stderr by the binary.
    pub fn to_error_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl From<crate::ingest::IngestError> for RunError {
    fn from(e: crate::ingest::IngestError) -> Self {
        use crate::ingest::IngestError::*;
        match e {
            UnknownSchema(_) => RunError::Config(e.to_string()),
            _ => RunError::Data(e.to_string()),
        }
    }
}

impl From<ValuationError> for RunError {
    fn from(e: ValuationError) -> Self {
        match e {
            ValuationError::ExactLimitExceeded { .. } => RunError::Infeasible(e.to_string()),
            ValuationError::BadGrid(_) => RunError::Config(e.to_string()),
            ValuationError::ZeroGroundTruth => RunError::Data(e.to_string()),
        }
    }
}

impl From<BenchError> for RunError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::TooFewRepetitions(_) => RunError::Config(e.to_string()),
            BenchError::TooFewSources { .. } => RunError::Data(e.to_string()),
            BenchError::Valuation(v) => v.into(),
        }
    }
}

impl From<GridError> for RunError {
    fn from(e: GridError) -> Self {
        RunError::Config(e.to_string())
    }
}

/// The subcommands exposed by the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    IngestReport,
    Value,
    Coop,
    BenchApprox,
    RetailCurve,
    Pims,
    MetricCompare,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::IngestReport => "ingest-report",
            Command::Value => "value",
            Command::Coop => "coop",
            Command::BenchApprox => "bench-approx",
            Command::RetailCurve => "retail-curve",
            Command::Pims => "pims",
            Command::MetricCompare => "metric-compare",
        }
    }
}

fn default_schema() -> String {
    "generic".into()
}
fn default_source_column() -> String {
    "company".into()
}
fn default_bin_minutes() -> u32 {
    60
}
fn default_forecaster() -> String {
    "seasonal_profile".into()
}
fn default_metric() -> String {
    "cossim".into()
}
fn default_algo() -> String {
    "exact".into()
}
fn default_rounds() -> u32 {
    4
}
fn default_tau() -> f64 {
    0.95
}
fn default_conv_threshold() -> f64 {
    0.01
}
fn default_reps() -> usize {
    50
}
fn default_exact_limit() -> usize {
    crate::valuation::DEFAULT_EXACT_LIMIT
}
fn default_family() -> String {
    "saturating".into()
}
fn default_n_players() -> usize {
    16
}
fn default_heavy() -> usize {
    8
}
fn default_beta() -> f64 {
    0.5
}
fn default_v_max() -> f64 {
    1.0
}
fn default_noise_scale() -> f64 {
    0.02
}
fn default_thresholds() -> Vec<f64> {
    vec![0.1, 0.2]
}
fn default_accuracy_floor() -> f64 {
    crate::bench::coop::DEFAULT_ACCURACY_FLOOR
}
fn default_samples_per_k() -> usize {
    200
}
fn default_target_fraction() -> f64 {
    0.95
}
fn default_accuracy_target() -> f64 {
    0.95
}
fn default_batch_size() -> usize {
    5
}
fn default_max_batches() -> usize {
    20
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_top_k_metrics() -> usize {
    4
}

/// Flat run configuration. Every field has a default, a JSON config file may
/// set any subset, and command-line flags override the file. The manifest a
/// run writes is this struct plus the command name, so manifests are configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub schema: String,
    pub source_column: String,
    pub from: Option<DateTime<Utc>>,
    pub to: Option<DateTime<Utc>>,
    pub zone: Option<String>,
    pub top_k: Option<usize>,
    pub bin_minutes: u32,
    pub control_start: Option<DateTime<Utc>>,
    pub forecaster: String,
    pub metric: String,
    pub algo: String,
    pub algos: Option<Vec<String>>,
    pub rounds: u32,
    pub tau: f64,
    pub conv_threshold: f64,
    pub max_permutations: Option<usize>,
    pub reps: usize,
    pub seed: Option<u64>,
    pub exact_limit: usize,
    pub family: String,
    pub n_players: usize,
    pub heavy: usize,
    pub beta: f64,
    pub v_max: f64,
    pub noise_scale: f64,
    pub thresholds: Vec<f64>,
    pub accuracy_floor: f64,
    pub k_values: Option<Vec<usize>>,
    pub samples_per_k: usize,
    pub target_fraction: f64,
    pub accuracy_target: f64,
    pub batch_size: usize,
    pub max_batches: usize,
    pub strict: bool,
    pub top_k_metrics: usize,
    pub workers: Option<usize>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            schema: default_schema(),
            source_column: default_source_column(),
            from: None,
            to: None,
            zone: None,
            top_k: None,
            bin_minutes: default_bin_minutes(),
            control_start: None,
            forecaster: default_forecaster(),
            metric: default_metric(),
            algo: default_algo(),
            algos: None,
            rounds: default_rounds(),
            tau: default_tau(),
            conv_threshold: default_conv_threshold(),
            max_permutations: None,
            reps: default_reps(),
            seed: None,
            exact_limit: default_exact_limit(),
            family: default_family(),
            n_players: default_n_players(),
            heavy: default_heavy(),
            beta: default_beta(),
            v_max: default_v_max(),
            noise_scale: default_noise_scale(),
            thresholds: default_thresholds(),
            accuracy_floor: default_accuracy_floor(),
            k_values: None,
            samples_per_k: default_samples_per_k(),
            target_fraction: default_target_fraction(),
            accuracy_target: default_accuracy_target(),
            batch_size: default_batch_size(),
            max_batches: default_max_batches(),
            strict: false,
            top_k_metrics: default_top_k_metrics(),
            workers: None,
            out: default_out(),
        }
    }
}

impl RunConfig {
    /// Reads a config (or a manifest, whose extra `command` key is ignored).
    pub fn from_file(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| RunError::Config(format!("bad config {}: {e}", path.display())))
    }

    fn metric_kind(&self) -> Result<SimilarityMetric, RunError> {
        SimilarityMetric::from_name(&self.metric)
            .ok_or_else(|| RunError::Config(format!("unknown metric '{}'", self.metric)))
    }

    fn forecaster_kind(&self) -> Result<ForecasterKind, RunError> {
        ForecasterKind::from_name(&self.forecaster)
            .ok_or_else(|| RunError::Config(format!("unknown forecaster '{}'", self.forecaster)))
    }

    fn source_column_kind(&self) -> Result<SourceColumn, RunError> {
        SourceColumn::from_name(&self.source_column)
            .ok_or_else(|| RunError::Config(format!("unknown source column '{}'", self.source_column)))
    }

    fn estimator(&self, name: &str) -> Result<EstimatorSpec, RunError> {
        let mut spec = EstimatorSpec::from_name(name, self.rounds, self.conv_threshold, self.tau)
            .ok_or_else(|| RunError::Config(format!("unknown algorithm '{name}'")))?;
        if let Some(max) = self.max_permutations {
            spec.max_permutations = max;
        }
        Ok(spec)
    }

    fn required_seed(&self) -> Result<u64, RunError> {
        self.seed
            .ok_or_else(|| RunError::Config("--seed is required for stochastic runs".into()))
    }
}

/// Files written by a successful run.
#[derive(Debug)]
pub struct RunSummary {
    pub written: Vec<PathBuf>,
}

/// Executes a command: validates the config, caps parallelism when requested,
/// and writes the outputs plus a manifest atomically into the output directory.
pub fn execute(command: Command, config: &RunConfig) -> Result<RunSummary, RunError> {
    match config.workers {
        Some(workers) => {
            if workers == 0 {
                return Err(RunError::Config("--workers must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| RunError::Config(format!("cannot build worker pool: {e}")))?;
            pool.install(|| dispatch(command, config))
        }
        None => dispatch(command, config),
    }
}

fn dispatch(command: Command, config: &RunConfig) -> Result<RunSummary, RunError> {
    let mut outputs = OutputDir::new(&config.out)?;
    match command {
        Command::IngestReport => ingest_report(config, &mut outputs)?,
        Command::Value => value(config, &mut outputs)?,
        Command::Coop => coop(config, &mut outputs)?,
        Command::BenchApprox => bench_approx(config, &mut outputs)?,
        Command::RetailCurve => retail_curve(config, &mut outputs)?,
        Command::Pims => pims(config, &mut outputs)?,
        Command::MetricCompare => metric_compare(config, &mut outputs)?,
    }
    outputs.write_manifest(command, config)?;
    Ok(RunSummary {
        written: outputs.written,
    })
}

/// Atomic writer: contents land under a temp name and are renamed into place.
struct OutputDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    fn new(dir: &Path) -> Result<Self, RunError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| RunError::Data(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let io = |e: std::io::Error| RunError::Data(format!("cannot write {}: {e}", target.display()));
        let mut file = std::fs::File::create(&tmp).map_err(io)?;
        file.write_all(bytes).map_err(io)?;
        file.sync_all().map_err(io)?;
        drop(file);
        std::fs::rename(&tmp, &target).map_err(io)?;
        self.written.push(target);
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn write_manifest(&mut self, command: Command, config: &RunConfig) -> Result<(), RunError> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            command: &'a str,
            #[serde(flatten)]
            config: &'a RunConfig,
        }
        self.write_json(
            "manifest.json",
            &Manifest {
                command: command.name(),
                config,
            },
        )
    }
}

// --- shared pipeline pieces ---

fn load_records(config: &RunConfig) -> Result<(Vec<crate::ingest::TripRecord>, LoadReport), RunError> {
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| RunError::Config("--input is required for this command".into()))?;
    let schema = Schema::from_name(&config.schema, config.source_column_kind()?)?;
    let from = config
        .from
        .ok_or_else(|| RunError::Config("--from is required".into()))?;
    let to = config
        .to
        .ok_or_else(|| RunError::Config("--to is required".into()))?;
    if to <= from {
        return Err(RunError::Config("--to must be after --from".into()));
    }
    let load = load_trips(input, schema, (from, to))?;
    Ok((load.records, load.report))
}

fn build_grid(config: &RunConfig) -> Result<TimeGrid, RunError> {
    let from = config.from.expect("validated by load_records");
    let to = config.to.expect("validated by load_records");
    let width = Duration::minutes(config.bin_minutes as i64);
    let span = (to - from).num_seconds();
    let bin = width.num_seconds();
    if bin <= 0 || span % bin != 0 {
        return Err(RunError::Config(
            "the date range must be a whole number of bins".into(),
        ));
    }
    let grid = TimeGrid::new(from, width, (span / bin) as usize)?;
    let control_start = config
        .control_start
        .ok_or_else(|| RunError::Config("--control-start is required".into()))?;
    Ok(grid.split_at(control_start)?)
}

fn load_panel(config: &RunConfig) -> Result<DemandPanel, RunError> {
    let (records, _) = load_records(config)?;
    let grid = build_grid(config)?;
    let zone = config.zone.as_ref().map(|z| ZoneId::new(z.clone()));
    let binned = bin_demand(&records, &grid, zone.as_ref());
    if binned.is_empty() {
        return Err(RunError::Data("no trips survived filtering; nothing to value".into()));
    }
    Ok(build_panel(grid, zone, binned, config.top_k)?)
}

fn build_synthetic_game(config: &RunConfig) -> Result<ValuationGame, RunError> {
    let n = config.n_players;
    if n == 0 {
        return Err(RunError::Config("--n must be at least 1".into()));
    }
    let seed = config.required_seed()?;
    let game = match config.family.as_str() {
        "saturating" => ValuationGame::new(SaturatingGame::new(
            n,
            config.heavy.min(n),
            config.beta,
            config.v_max,
            config.noise_scale,
            seed,
        )),
        "additive" => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let weights = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            ValuationGame::new(AdditiveGame::new(weights))
        }
        "unanimity" => ValuationGame::new(crate::bench::synthetic::UnanimityGame::new(
            n,
            0..config.heavy.clamp(1, n),
        )),
        "complementary-pair" => ValuationGame::new(ComplementaryPairGame),
        "random" => ValuationGame::new(RandomGame::new(n, seed)),
        "random-monotone" => ValuationGame::new(RandomMonotoneGame::new(n, seed)),
        other => return Err(RunError::Config(format!("unknown game family '{other}'"))),
    };
    Ok(game)
}

/// Game for commands that accept either a CSV panel or a synthetic family:
/// the input path wins when present.
fn load_game(config: &RunConfig) -> Result<ValuationGame, RunError> {
    if config.input.is_some() {
        let panel = load_panel(config)?;
        let game = ForecastValueGame::new(
            panel,
            config.forecaster_kind()?.build(),
            config.metric_kind()?,
        )?;
        Ok(game.into_game())
    } else {
        build_synthetic_game(config)
    }
}

/// Prints live evaluation counts to stderr while `work` runs, so the cost of
/// big subset enumerations is observable.
fn with_progress<T: Send>(game: &ValuationGame, label: &str, work: impl FnOnce() -> T + Send) -> T {
    use std::sync::atomic::{AtomicBool, Ordering};
    let done = AtomicBool::new(false);
    std::thread::scope(|scope| {
        scope.spawn(|| {
            let mut last = 0;
            while !done.load(Ordering::Relaxed) {
                std::thread::sleep(std::time::Duration::from_millis(500));
                let count = game.evaluations();
                if count != last {
                    eprintln!("{label}: evaluated {count} coalitions");
                    last = count;
                }
            }
        });
        let result = work();
        done.store(true, Ordering::Relaxed);
        result
    })
}

// --- commands ---

fn ingest_report(config: &RunConfig, outputs: &mut OutputDir) -> Result<(), RunError> {
    #[derive(Serialize)]
    struct IngestSummary {
        #[serde(flatten)]
        report: LoadReport,
        distinct_sources: usize,
        distinct_zones: usize,
    }
    let (records, report) = load_records(config)?;
    let mut sources: Vec<_> = records.iter().map(|r| r.source_id.clone()).collect();
    sources.sort_unstable();
    sources.dedup();
    let zones = distinct_zones(&records);
    outputs.write_json(
        "ingest_report.json",
        &IngestSummary {
            report,
            distinct_sources: sources.len(),
            distinct_zones: zones.len(),
        },
    )
}

fn value(config: &RunConfig, outputs: &mut OutputDir) -> Result<(), RunError> {
    let panel = load_panel(config)?;
    let metric = config.metric_kind()?;
    let forecaster = config.forecaster_kind()?;
    let game = ForecastValueGame::new(panel.clone(), forecaster.build(), metric)?.into_game();
    let n = game.n_players();

    let spec = config.estimator(&config.algo)?;
    let (shapley, seed) = if spec.algorithm == Algorithm::Exact {
        let phi = with_progress(&game, "exact shapley", || {
            exact_shapley_with_limit(&game, config.exact_limit)
        })?;
        (phi, None)
    } else {
        let seed = config.required_seed()?;
        if spec.algorithm != Algorithm::Mc && spec.rounds == 0 {
            return Err(RunError::Config("--rounds must be at least 1".into()));
        }
        (spec.estimate(&game, seed).phi, Some(seed))
    };
    let loo = leave_one_out(&game);
    let v_full = game.value(&Coalition::full(n));
    let report = ValueReport::assemble(
        &panel,
        &shapley,
        &loo,
        v_full,
        game.evaluations(),
        MethodMeta {
            algorithm: spec.name(),
            rounds: spec.is_stochastic().then_some(spec.rounds),
            tau: spec.truncation.enabled.then_some(spec.truncation.tau),
            convergence_threshold: (spec.algorithm == Algorithm::Mc)
                .then_some(spec.convergence_threshold),
            seed,
            metric: metric.name().to_owned(),
            forecaster: forecaster.name().to_owned(),
        },
    );
    let mut csv = Vec::new();
    report
        .write_csv(&mut csv)
        .map_err(|e| RunError::Data(e.to_string()))?;
    outputs.write("value_report.csv", &csv)?;
    outputs.write_json("value_report.json", &report)
}

fn coop(config: &RunConfig, outputs: &mut OutputDir) -> Result<(), RunError> {
    let (records, _) = load_records(config)?;
    let grid = build_grid(config)?;
    let zones: Vec<ZoneId> = match &config.zone {
        Some(z) => vec![ZoneId::new(z.clone())],
        None => distinct_zones(&records),
    };
    let metric = config.metric_kind()?;
    let forecaster = config.forecaster_kind()?;

    let mut panels = Vec::new();
    let mut skipped: Vec<(String, String)> = Vec::new();
    for zone in zones {
        let binned = bin_demand(&records, &grid, Some(&zone));
        if binned.len() < 2 {
            skipped.push((zone.to_string(), "fewer than 2 sources".into()));
            continue;
        }
        match build_panel(grid.clone(), Some(zone.clone()), binned, config.top_k) {
            Ok(panel) => {
                if panel.control_truth().iter().all(|v| *v == 0.0) {
                    skipped.push((zone.to_string(), "no demand in the control window".into()));
                } else {
                    panels.push(panel);
                }
            }
            Err(e) => skipped.push((zone.to_string(), e.to_string())),
        }
    }
    if panels.is_empty() {
        return Err(RunError::Data("no zone had enough sources to analyze".into()));
    }
    let analyses = cooperation_benefit(
        &panels,
        forecaster,
        metric,
        &config.thresholds,
        config.accuracy_floor,
    )?;

    let mut csv = String::new();
    csv.push_str("zone,n_sources,v_all,mean_singleton,benefit,sufficient_accuracy");
    for t in &config.thresholds {
        let _ = write!(csv, ",willing_{t}");
    }
    csv.push('\n');
    for row in &analyses {
        let mean_single = row.singleton_values.iter().sum::<f64>() / row.n_sources as f64;
        let _ = write!(
            csv,
            "{},{},{},{},{},{}",
            row.zone, row.n_sources, row.v_all, mean_single, row.benefit, row.sufficient_accuracy
        );
        for willing in &row.willing {
            let _ = write!(csv, ",{}", willing.count);
        }
        csv.push('\n');
    }
    outputs.write("cooperation.csv", csv.as_bytes())?;

    #[derive(Serialize)]
    struct CoopOutput<'a> {
        zones: &'a [crate::bench::coop::CooperationAnalysis],
        skipped: Vec<SkippedZone>,
    }
    #[derive(Serialize)]
    struct SkippedZone {
        zone: String,
        reason: String,
    }
    outputs.write_json(
        "cooperation.json",
        &CoopOutput {
            zones: &analyses,
            skipped: skipped
                .into_iter()
                .map(|(zone, reason)| SkippedZone { zone, reason })
                .collect(),
        },
    )
}

fn bench_approx(config: &RunConfig, outputs: &mut OutputDir) -> Result<(), RunError> {
    let game = load_game(config)?;
    let seed = config.required_seed()?;
    let exact_phi = with_progress(&game, "exact reference", || {
        exact_shapley_with_limit(&game, config.exact_limit)
    })?;

    let algo_names: Vec<String> = match &config.algos {
        Some(list) if !list.is_empty() => list.clone(),
        _ => vec![config.algo.clone()],
    };
    let mut rows: Vec<ApproximatorEvaluation> = Vec::new();
    for name in &algo_names {
        if name == "exact" {
            return Err(RunError::Config(
                "bench-approx compares samplers against exact; pick mc/tmc/rs/trs/ss/tss".into(),
            ));
        }
        let spec = config.estimator(name)?;
        rows.push(evaluate_approximator(
            &game,
            &spec,
            config.reps,
            &exact_phi,
            seed,
        )?);
    }

    let mut csv = String::from(
        "algorithm,rounds,tau,conv_threshold,repetitions,aaae,aape,aastd,mean_evaluations\n",
    );
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            row.algorithm,
            row.rounds,
            row.tau.map_or(String::new(), |t| t.to_string()),
            row.convergence_threshold.map_or(String::new(), |c| c.to_string()),
            row.repetitions,
            row.aaae,
            row.aape,
            row.aastd,
            row.mean_evaluations
        );
    }
    outputs.write("bench.csv", csv.as_bytes())?;
    outputs.write_json("bench.json", &rows)
}

fn retail_curve(config: &RunConfig, outputs: &mut OutputDir) -> Result<(), RunError> {
    let game = load_game(config)?;
    let seed = config.required_seed()?;
    let n = game.n_players();
    let k_values: Vec<usize> = match &config.k_values {
        Some(ks) if !ks.is_empty() => ks.clone(),
        _ => (1..=n).collect(),
    };
    for &k in &k_values {
        if k == 0 || k > n {
            return Err(RunError::Config(format!("k={k} is out of range for {n} sources")));
        }
    }
    if !(config.target_fraction > 0.0 && config.target_fraction <= 1.0) {
        return Err(RunError::Config("--target-fraction must be in (0, 1]".into()));
    }
    let curve = accuracy_probability_curve(
        &game,
        &k_values,
        config.samples_per_k,
        config.target_fraction,
        seed,
    );
    let mut csv = String::from("k,probability\n");
    for point in &curve {
        let _ = writeln!(csv, "{},{}", point.k, point.probability);
    }
    outputs.write("curve.csv", csv.as_bytes())?;
    outputs.write_json("curve.json", &curve)
}

fn pims(config: &RunConfig, outputs: &mut OutputDir) -> Result<(), RunError> {
    let game = load_game(config)?;
    let seed = config.required_seed()?;
    if config.batch_size == 0 || config.max_batches == 0 {
        return Err(RunError::Config("--batch-size and --max-batches must be at least 1".into()));
    }
    if !config.accuracy_target.is_finite() {
        return Err(RunError::Config("--accuracy-target must be a finite number".into()));
    }
    let outcome = pims_select(
        &game,
        config.accuracy_target,
        config.batch_size,
        config.max_batches,
        seed,
    );
    outputs.write_json("pims.json", &outcome)?;
    if config.strict && !outcome.achieved {
        return Err(RunError::Infeasible(format!(
            "accuracy target {} not reached after {} batches (best value {})",
            config.accuracy_target, outcome.batches_used, outcome.value
        )));
    }
    Ok(())
}

fn metric_compare(config: &RunConfig, outputs: &mut OutputDir) -> Result<(), RunError> {
    let panel = load_panel(config)?;
    let spec = config.estimator(&config.algo)?;
    let seed = if spec.is_stochastic() {
        config.required_seed()?
    } else {
        0
    };
    let result = metric_cross_validation(
        &panel,
        config.forecaster_kind()?,
        &SimilarityMetric::ALL,
        &spec,
        seed,
        config.top_k_metrics,
    )?;

    let mut csv = String::from("source");
    for metric in &result.per_metric {
        let _ = write!(csv, ",share_{}", metric.metric);
    }
    csv.push('\n');
    for (i, source) in result.sources.iter().enumerate() {
        let _ = write!(csv, "{source}");
        for metric in &result.per_metric {
            let _ = write!(csv, ",{}", metric.shares[i]);
        }
        csv.push('\n');
    }
    outputs.write("metric_compare.csv", csv.as_bytes())?;
    outputs.write_json("metric_compare.json", &result)
}

/// Parses the date formats accepted on the command line: a bare date (taken
/// as midnight UTC), `YYYY-MM-DDTHH:MM:SS`, the same with a space, or RFC 3339.
pub fn parse_instant(raw: &str) -> Result<DateTime<Utc>, RunError> {
    if let Ok(date) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Ok(Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).unwrap()));
    }
    if let Ok(naive) = NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S"))
    {
        return Ok(Utc.from_utc_datetime(&naive));
    }
    if let Ok(instant) = DateTime::parse_from_rfc3339(raw) {
        return Ok(instant.with_timezone(&Utc));
    }
    Err(RunError::Config(format!("cannot parse instant '{raw}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_instant_accepts_the_documented_forms() {
        let midnight = parse_instant("2019-04-15").unwrap();
        assert_eq!(midnight, Utc.with_ymd_and_hms(2019, 4, 15, 0, 0, 0).unwrap());
        assert_eq!(parse_instant("2019-04-15T06:30:00").unwrap().to_rfc3339(), "2019-04-15T06:30:00+00:00");
        assert_eq!(parse_instant("2019-04-15 06:30:00").unwrap(), parse_instant("2019-04-15T06:30:00").unwrap());
        assert!(parse_instant("April 15").is_err());
    }

    #[test]
    fn config_file_round_trips_through_the_manifest_shape() {
        let config = RunConfig {
            seed: Some(7),
            algo: "ss".into(),
            ..RunConfig::default()
        };
        #[derive(Serialize)]
        struct Manifest<'a> {
            command: &'a str,
            #[serde(flatten)]
            config: &'a RunConfig,
        }
        let manifest = serde_json::to_string_pretty(&Manifest {
            command: "value",
            config: &config,
        })
        .unwrap();
        let parsed: RunConfig = serde_json::from_str(&manifest).unwrap();
        assert_eq!(parsed.seed, Some(7));
        assert_eq!(parsed.algo, "ss");
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(RunError::Config("x".into()).exit_code(), 2);
        assert_eq!(RunError::Data("x".into()).exit_code(), 3);
        assert_eq!(RunError::Infeasible("x".into()).exit_code(), 4);
        let json = RunError::Config("bad".into()).to_error_json();
        assert!(json.contains("\"error\":\"config\""));
    }
}
