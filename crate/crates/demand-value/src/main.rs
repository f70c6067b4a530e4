//! Thin command-line front end: parses flags, merges them over an optional
//! JSON config, and hands off to the library's run module.

use clap::{Args, Parser, Subcommand};

use demand_value::run::{execute, parse_instant, Command, RunConfig, RunError};

use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "demand-value",
    about = "Relative valuation of pooled demand data: Shapley values, heuristics and benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Parse a trip CSV and report accepted/dropped row counts.
    IngestReport(Flags),
    /// Value each source of a panel: Shapley, leave-one-out and volume shares.
    Value(Flags),
    /// Per-zone benefit-of-cooperation analysis.
    Coop(Flags),
    /// Score Shapley approximators against exact values.
    BenchApprox(Flags),
    /// Probability that k random sources reach a target accuracy.
    RetailCurve(Flags),
    /// Batch-by-batch marketplace selection until an accuracy target is met.
    Pims(Flags),
    /// Compare Shapley shares across similarity metrics.
    MetricCompare(Flags),
}

impl CliCommand {
    fn split(self) -> (Command, Flags) {
        match self {
            CliCommand::IngestReport(f) => (Command::IngestReport, f),
            CliCommand::Value(f) => (Command::Value, f),
            CliCommand::Coop(f) => (Command::Coop, f),
            CliCommand::BenchApprox(f) => (Command::BenchApprox, f),
            CliCommand::RetailCurve(f) => (Command::RetailCurve, f),
            CliCommand::Pims(f) => (Command::Pims, f),
            CliCommand::MetricCompare(f) => (Command::MetricCompare, f),
        }
    }
}

/// Every tunable, all optional; precedence is flag > config file > default.
#[derive(Args)]
struct Flags {
    /// JSON config file; a manifest from a previous run works as-is.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trip CSV to ingest (omit to run benchmark commands on a synthetic game).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input schema: generic, chicago or nyc.
    #[arg(long)]
    schema: Option<String>,
    /// Chicago source column: company or driver.
    #[arg(long)]
    source_column: Option<String>,
    /// Start of the date range (inclusive), e.g. 2019-03-04.
    #[arg(long)]
    from: Option<String>,
    /// End of the date range (exclusive).
    #[arg(long)]
    to: Option<String>,
    /// Restrict to one zone (default: city-wide, or a sweep for coop).
    #[arg(long)]
    zone: Option<String>,
    /// Keep the k largest sources and pool the rest into a TAIL source.
    #[arg(long)]
    top_k: Option<usize>,
    /// Bin width in minutes (default 60).
    #[arg(long)]
    bin_minutes: Option<u32>,
    /// First instant of the control window.
    #[arg(long)]
    control_start: Option<String>,
    /// Similarity metric: cossim, numsim or rdtw.
    #[arg(long)]
    metric: Option<String>,
    /// Forecaster: seasonal_profile.
    #[arg(long)]
    forecaster: Option<String>,
    /// Algorithm: exact, mc, tmc, rs, trs, ss or tss.
    #[arg(long)]
    algo: Option<String>,
    /// Comma-separated algorithm list for bench-approx.
    #[arg(long, value_delimiter = ',')]
    algos: Option<Vec<String>>,
    /// Sampling rounds r (plans walk r * n permutations).
    #[arg(long)]
    rounds: Option<u32>,
    /// Truncation fraction of v(full) for tmc/trs/tss.
    #[arg(long)]
    tau: Option<f64>,
    /// Monte Carlo convergence threshold.
    #[arg(long)]
    conv_threshold: Option<f64>,
    /// Hard cap on Monte Carlo permutations.
    #[arg(long)]
    max_permutations: Option<usize>,
    /// Benchmark repetitions per algorithm.
    #[arg(long)]
    reps: Option<usize>,
    /// RNG seed; required for any stochastic run.
    #[arg(long)]
    seed: Option<u64>,
    /// Player-count ceiling for exact enumeration.
    #[arg(long)]
    exact_limit: Option<usize>,
    /// Synthetic game family for input-less benchmark commands.
    #[arg(long)]
    family: Option<String>,
    /// Synthetic game size.
    #[arg(long = "n")]
    n_players: Option<usize>,
    /// Heavy-subset size of the saturating family.
    #[arg(long)]
    heavy: Option<usize>,
    /// Saturation rate of the saturating family.
    #[arg(long)]
    beta: Option<f64>,
    /// Value ceiling of the saturating family.
    #[arg(long)]
    v_max: Option<f64>,
    /// Per-player noise scale of the saturating family.
    #[arg(long)]
    noise_scale: Option<f64>,
    /// Comma-separated cooperation thresholds.
    #[arg(long, value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
    /// Accuracy floor below which a zone is flagged unforecastable.
    #[arg(long)]
    accuracy_floor: Option<f64>,
    /// Comma-separated coalition sizes for retail-curve.
    #[arg(long, value_delimiter = ',')]
    k_values: Option<Vec<usize>>,
    /// Random subsets drawn per k.
    #[arg(long)]
    samples_per_k: Option<usize>,
    /// Fraction of v(full) that counts as a hit for retail-curve.
    #[arg(long)]
    target_fraction: Option<f64>,
    /// Absolute accuracy target for pims.
    #[arg(long)]
    accuracy_target: Option<f64>,
    /// Sources added per pims batch.
    #[arg(long)]
    batch_size: Option<usize>,
    /// Batch budget before pims gives up.
    #[arg(long)]
    max_batches: Option<usize>,
    /// Exit non-zero when pims misses its target.
    #[arg(long)]
    strict: bool,
    /// Top-k set size for metric-compare rank agreement.
    #[arg(long)]
    top_k_metrics: Option<usize>,
    /// Cap on worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory (default ./out).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Flags {
    fn into_config(self) -> Result<RunConfig, RunError> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! overlay {
            ($($field:ident),+ $(,)?) => {
                $(if let Some(v) = self.$field { config.$field = v; })+
            };
        }
        overlay!(
            schema,
            source_column,
            bin_minutes,
            metric,
            forecaster,
            algo,
            rounds,
            tau,
            conv_threshold,
            reps,
            exact_limit,
            family,
            n_players,
            heavy,
            beta,
            v_max,
            noise_scale,
            thresholds,
            accuracy_floor,
            samples_per_k,
            target_fraction,
            accuracy_target,
            batch_size,
            max_batches,
            top_k_metrics,
            out,
        );
        if let Some(input) = self.input {
            config.input = Some(input);
        }
        if let Some(zone) = self.zone {
            config.zone = Some(zone);
        }
        if let Some(top_k) = self.top_k {
            config.top_k = Some(top_k);
        }
        if let Some(algos) = self.algos {
            config.algos = Some(algos);
        }
        if let Some(max) = self.max_permutations {
            config.max_permutations = Some(max);
        }
        if let Some(seed) = self.seed {
            config.seed = Some(seed);
        }
        if let Some(k_values) = self.k_values {
            config.k_values = Some(k_values);
        }
        if let Some(workers) = self.workers {
            config.workers = Some(workers);
        }
        if self.strict {
            config.strict = true;
        }
        if let Some(raw) = self.from.as_deref() {
            config.from = Some(parse_instant(raw)?);
        }
        if let Some(raw) = self.to.as_deref() {
            config.to = Some(parse_instant(raw)?);
        }
        if let Some(raw) = self.control_start.as_deref() {
            config.control_start = Some(parse_instant(raw)?);
        }
        Ok(config)
    }
}

fn main() {
    let cli = Cli::parse();
    let (command, flags) = cli.command.split();
    let result = flags.into_config().and_then(|config| execute(command, &config));
    match result {
        Ok(summary) => {
            for path in summary.written {
                eprintln!("wrote {}", path.display());
            }
        }
        Err(err) => {
            eprintln!("{}", err.to_error_json());
            std::process::exit(err.exit_code());
        }
    }
}
