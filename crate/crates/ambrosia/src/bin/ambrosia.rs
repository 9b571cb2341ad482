//! `ambrosia` — run dual-prediction data-reduction experiments from the
//! command line.
//!
//! One subcommand per experiment; each writes plot-ready CSV/JSON plus a run
//! manifest recording the fully resolved configuration, so any output can be
//! regenerated bit-exactly with `ambrosia rerun --manifest <file>`.
//!
//! Exit codes: 0 success, 1 invalid configuration or input, 2 runtime failure.
//! Validation failures produce no partial output files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ambrosia::anomaly::{peak_report, score_stream, ForestConfig};
use ambrosia::displacement::displacement_impact;
use ambrosia::energy::{lifetime_years, profile_by_name, TrafficModel};
use ambrosia::error::{Error, Result};
use ambrosia::forecast::{measure_throughput, ForecasterKind};
use ambrosia::manifest::RunManifest;
use ambrosia::metrics::{compute_metrics, sweep, sweep_to_csv};
use ambrosia::protocol::{frame_stream, run_session, ProtocolConfig};
use ambrosia::timeseries::{format_float, SignalKind, SyntheticSpec, TimeSeries};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "AMBROSIA_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "ambrosia",
    version,
    about = "Dual-prediction sensor data reduction: simulate, sweep, and quantify"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one encoder/decoder session and report its metrics
    Simulate(SimulateCmd),
    /// Sweep thresholds (and forecasters) over one input, emitting a table
    Sweep(SweepCmd),
    /// Score anomalies on true vs reduced streams and compare peak sets
    Anomaly(AnomalyCmd),
    /// Battery-lifetime curves per radio technology and data fraction
    Lifetime(LifetimeCmd),
    /// Per-sample execution time of the window scheme vs refitting AR
    CompareForecasters(CompareCmd),
    /// Double-integrate acceleration and measure the reduction's impact
    Displacement(DisplacementCmd),
    /// Re-execute a previous run from its manifest
    Rerun(RerunCmd),
}

impl Cmd {
    fn run(self) -> Result<()> {
        match self {
            Cmd::Simulate(c) => c.run(),
            Cmd::Sweep(c) => c.run(),
            Cmd::Anomaly(c) => c.run(),
            Cmd::Lifetime(c) => c.run(),
            Cmd::CompareForecasters(c) => c.run(),
            Cmd::Displacement(c) => c.run(),
            Cmd::Rerun(c) => c.run(),
        }
    }
}

/// An additive spike for synthetic inputs, written `INDEX:MAGNITUDE`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpikeSpec {
    index: usize,
    magnitude: f64,
}

impl FromStr for SpikeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (i, m) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidConfig(format!("spike {s:?}: expected INDEX:MAGNITUDE")))?;
        Ok(SpikeSpec {
            index: i
                .trim()
                .parse()
                .map_err(|e| Error::InvalidConfig(format!("spike index {i:?}: {e}")))?,
            magnitude: m
                .trim()
                .parse()
                .map_err(|e| Error::InvalidConfig(format!("spike magnitude {m:?}: {e}")))?,
        })
    }
}

/// Where the series comes from: a CSV file or a seeded synthetic recipe.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct InputOpts {
    /// CSV input with a header row (needs the value column; uses a
    /// `timestamp` column for the sample period when present)
    #[arg(long, conflicts_with = "gen")]
    input: Option<PathBuf>,

    /// Name of the value column in --input
    #[arg(long, default_value = "value")]
    value_column: String,

    /// Synthetic signal recipe: constant:V, linear:SLOPE,INTERCEPT,
    /// sinusoid:AMP,PERIOD, ar1:COEFF, random_walk:STEP_STD
    #[arg(long)]
    gen: Option<SignalKind>,

    /// Length of the synthetic series
    #[arg(long, default_value_t = 200)]
    len: usize,

    /// Additive Gaussian noise std-dev for the synthetic series
    #[arg(long, default_value_t = 0.0)]
    noise: f64,

    /// RNG seed for the synthetic series
    #[arg(long, default_value_t = 42)]
    gen_seed: u64,

    /// Additive spike INDEX:MAGNITUDE (repeatable)
    #[arg(long = "spike")]
    spikes: Vec<SpikeSpec>,

    /// Sample period of the synthetic series, seconds
    #[arg(long, default_value_t = 1.0)]
    sample_period: f64,
}

impl InputOpts {
    fn load(&self) -> Result<TimeSeries> {
        match (&self.input, &self.gen) {
            (Some(path), _) => TimeSeries::load_csv(path, &self.value_column),
            (None, Some(kind)) => {
                let mut spec = SyntheticSpec::new(*kind, self.len, self.noise, self.gen_seed);
                spec.sample_period = self.sample_period;
                spec.anomalies = self.spikes.iter().map(|s| (s.index, s.magnitude)).collect();
                spec.generate()
            }
            (None, None) => Err(Error::InvalidConfig(
                "no input: pass --input FILE or --gen RECIPE".into(),
            )),
        }
    }

    /// Seed recorded in the manifest; absent for file inputs.
    fn manifest_seed(&self) -> Option<u64> {
        self.gen.map(|_| self.gen_seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ForecasterChoice {
    Window,
    Arima,
}

/// Forecaster selection shared by the session-running subcommands.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct ForecastOpts {
    /// Forecasting scheme run at both endpoints
    #[arg(long, value_enum, default_value = "window")]
    forecaster: ForecasterChoice,

    /// Window size w for the window scheme (bootstrap is w+1 samples)
    #[arg(long, default_value_t = 5)]
    window: usize,

    /// AR order p for the arima scheme
    #[arg(long, default_value_t = 3)]
    ar_order: usize,

    /// Leading samples used to fit the AR coefficients (also its bootstrap)
    #[arg(long, default_value_t = 50)]
    fit_window: usize,

    /// Refit the AR coefficients on the trailing window every N samples
    #[arg(long)]
    refit_every: Option<usize>,
}

impl ForecastOpts {
    fn kind(&self) -> ForecasterKind {
        match self.forecaster {
            ForecasterChoice::Window => ForecasterKind::window(self.window),
            ForecasterChoice::Arima => ForecasterKind::Arima {
                p: self.ar_order,
                fit_window: self.fit_window,
                refit_every: self.refit_every,
            },
        }
    }

    fn kind_for(&self, choice: ForecasterChoice) -> ForecasterKind {
        ForecastOpts {
            forecaster: choice,
            ..self.clone()
        }
        .kind()
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct OutputOpts {
    /// Output directory (default: $AMBROSIA_OUT_DIR, else ".")
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Basename prefix for output files (default: the subcommand name)
    #[arg(long)]
    prefix: Option<String>,
}

impl OutputOpts {
    /// Materializes defaults so the manifest records the resolved values.
    fn resolve(&mut self, default_prefix: &str) {
        if self.out_dir.is_none() {
            self.out_dir = Some(
                std::env::var_os(OUT_DIR_ENV)
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from(".")),
            );
        }
        if self.prefix.is_none() {
            self.prefix = Some(default_prefix.to_string());
        }
    }
}

/// Buffers every output file; nothing touches disk until `commit`, so a
/// failure anywhere leaves no partial outputs behind.
struct Outputs {
    dir: PathBuf,
    prefix: String,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new(out: &OutputOpts) -> Self {
        Self {
            dir: out.out_dir.clone().expect("resolved"),
            prefix: out.prefix.clone().expect("resolved"),
            files: Vec::new(),
        }
    }

    fn add(&mut self, suffix: &str, contents: impl Into<Vec<u8>>) {
        self.files
            .push((format!("{}_{suffix}", self.prefix), contents.into()));
    }

    fn add_manifest(&mut self, manifest: &RunManifest) -> Result<()> {
        self.add(
            "manifest.json",
            serde_json::to_string_pretty(manifest)? + "\n",
        );
        Ok(())
    }

    fn commit(self) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        for (name, contents) in &self.files {
            let path = self.dir.join(name);
            std::fs::write(&path, contents)?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn make_manifest(
    subcommand: &str,
    config: &impl Serialize,
    input: &Option<PathBuf>,
    seed: Option<u64>,
) -> Result<RunManifest> {
    let manifest = RunManifest::new(subcommand, serde_json::to_value(config)?, seed);
    match input {
        Some(path) => manifest.with_input_file(path),
        None => Ok(manifest),
    }
}

fn parse_float(s: &str) -> std::result::Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("{e}: {s:?}"))
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
struct SimulateCmd {
    #[command(flatten)]
    input: InputOpts,

    #[command(flatten)]
    forecast: ForecastOpts,

    /// Send-on-delta threshold: transmit only when |true - predicted| > delta
    #[arg(long, default_value_t = 0.5, value_parser = parse_float)]
    delta: f64,

    #[command(flatten)]
    out: OutputOpts,
}

impl SimulateCmd {
    fn run(mut self) -> Result<()> {
        self.out.resolve("simulate");
        let series = self.input.load()?;
        let config = ProtocolConfig::new(self.forecast.kind(), self.delta)?;
        let log = run_session(&series, &config)?;
        let metrics = compute_metrics(&log)?;
        let (_, frame_summary) = frame_stream(&log);

        let mut outputs = Outputs::new(&self.out);
        outputs.add("session.csv", log.to_csv());
        outputs.add(
            "metrics.json",
            serde_json::to_string_pretty(&serde_json::json!({
                "delta": self.delta,
                "metrics": metrics,
                "framing": frame_summary,
            }))? + "\n",
        );
        let manifest =
            make_manifest("simulate", &self, &self.input.input, self.input.manifest_seed())?;
        outputs.add_manifest(&manifest)?;
        outputs.commit()?;
        println!(
            "sent {} of {} samples ({}%), mse {}",
            metrics.samples_sent,
            metrics.n,
            format_float(metrics.data_sent_pct),
            format_float(metrics.mse),
        );
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
struct SweepCmd {
    #[command(flatten)]
    input: InputOpts,

    #[command(flatten)]
    forecast: ForecastOpts,

    /// Ascending thresholds to sweep
    #[arg(long, value_delimiter = ',', default_value = "0,0.4,0.8,1.2", value_parser = parse_float)]
    deltas: Vec<f64>,

    /// Forecasters to compare side by side
    #[arg(long, value_delimiter = ',', value_enum, default_value = "window,arima")]
    forecasters: Vec<ForecasterChoice>,

    /// Table layout for the output file
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,

    #[command(flatten)]
    out: OutputOpts,
}

impl SweepCmd {
    fn run(mut self) -> Result<()> {
        self.out.resolve("sweep");
        let series = self.input.load()?;
        let configs: Vec<ProtocolConfig> = self
            .forecasters
            .iter()
            .map(|&choice| ProtocolConfig::new(self.forecast.kind_for(choice), 0.0))
            .collect::<Result<_>>()?;
        let rows = sweep(&series, &self.deltas, &configs)?;

        let mut outputs = Outputs::new(&self.out);
        match self.format {
            TableFormat::Csv => outputs.add("table.csv", sweep_to_csv(&rows)),
            TableFormat::Json => {
                outputs.add("table.json", serde_json::to_string_pretty(&rows)? + "\n")
            }
        }
        let manifest =
            make_manifest("sweep", &self, &self.input.input, self.input.manifest_seed())?;
        outputs.add_manifest(&manifest)?;
        outputs.commit()?;
        for row in &rows {
            for cell in &row.cells {
                println!(
                    "delta {} {}: sent {}%",
                    format_float(row.delta),
                    cell.forecaster,
                    format_float(cell.metrics.data_sent_pct),
                );
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// anomaly

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
struct AnomalyCmd {
    #[command(flatten)]
    input: InputOpts,

    #[command(flatten)]
    forecast: ForecastOpts,

    /// Thresholds at which to compare the reduced stream's anomaly scores
    #[arg(long, value_delimiter = ',', default_value = "0.5", value_parser = parse_float)]
    deltas: Vec<f64>,

    /// Trees in the random cut forest
    #[arg(long, default_value_t = 40)]
    trees: usize,

    /// Shingles per tree before FIFO eviction starts
    #[arg(long, default_value_t = 256)]
    tree_size: usize,

    /// Shingle length (scoring dimensionality)
    #[arg(long, default_value_t = 4)]
    shingle: usize,

    /// Forest RNG seed (independent of the generator seed)
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Score level above which a run of samples counts as one peak
    #[arg(long, default_value_t = 25.0, value_parser = parse_float)]
    tau: f64,

    /// Index slack when matching true and reduced peaks (default: shingle)
    #[arg(long)]
    match_tolerance: Option<usize>,

    #[command(flatten)]
    out: OutputOpts,
}

impl AnomalyCmd {
    fn run(mut self) -> Result<()> {
        self.out.resolve("anomaly");
        if self.match_tolerance.is_none() {
            self.match_tolerance = Some(self.shingle);
        }
        let tolerance = self.match_tolerance.expect("resolved");
        let series = self.input.load()?;
        let forest = ForestConfig {
            num_trees: self.trees,
            tree_capacity: self.tree_size,
            shingle: self.shingle,
            seed: self.seed,
        };
        forest.validate()?;
        let scores_true = score_stream(&series, &forest)?;

        let mut outputs = Outputs::new(&self.out);
        let mut reports = Vec::with_capacity(self.deltas.len());
        for &delta in &self.deltas {
            let config = ProtocolConfig::new(self.forecast.kind(), delta)?;
            let log = run_session(&series, &config)?;
            let processed = TimeSeries::from_values(&log.processed_values(), series.sample_period())?;
            let scores_processed = score_stream(&processed, &forest)?;
            let report = peak_report(&scores_true, &scores_processed, self.tau, tolerance);

            let mut csv = String::from("index,score_true,score_processed\n");
            for (i, (st, sp)) in scores_true.iter().zip(&scores_processed).enumerate() {
                let _ = writeln!(csv, "{i},{},{}", format_float(*st), format_float(*sp));
            }
            outputs.add(&format!("scores_delta{}.csv", format_float(delta)), csv);
            println!(
                "delta {}: sent {}%, peaks preserved: {}",
                format_float(delta),
                format_float(compute_metrics(&log)?.data_sent_pct),
                if report.preserved { "yes" } else { "no" },
            );
            reports.push(serde_json::json!({
                "delta": delta,
                "data_sent_pct": compute_metrics(&log)?.data_sent_pct,
                "report": report,
            }));
        }
        outputs.add("peaks.json", serde_json::to_string_pretty(&reports)? + "\n");
        let manifest =
            make_manifest("anomaly", &self, &self.input.input, self.input.manifest_seed())?;
        outputs.add_manifest(&manifest)?;
        outputs.commit()
    }
}

// ---------------------------------------------------------------------------
// lifetime

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
struct LifetimeCmd {
    /// Radio technology: 802.11psm, ble, 802.15.4, lora, sigfox
    #[arg(long, default_value = "lora")]
    tech: String,

    /// Transmission intervals, seconds
    #[arg(long, value_delimiter = ',', default_value = "3600", value_parser = parse_float)]
    ti: Vec<f64>,

    /// Data fractions in [0, 1] to tabulate
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1",
        value_parser = parse_float
    )]
    fractions: Vec<f64>,

    /// Battery energy, joules
    #[arg(long, default_value_t = 13_500.0, value_parser = parse_float)]
    battery_joules: f64,

    /// Payload bytes per interval at 100% transmission
    #[arg(long, default_value_t = 1000.0, value_parser = parse_float)]
    payload_bytes: f64,

    /// Fixed per-transmission radio overhead, bytes
    #[arg(long, default_value_t = 0.0, value_parser = parse_float)]
    overhead_bytes: f64,

    /// Override the profile's transmit data rate, bytes/second
    #[arg(long, value_parser = parse_float)]
    data_rate: Option<f64>,

    #[command(flatten)]
    out: OutputOpts,
}

impl LifetimeCmd {
    fn run(mut self) -> Result<()> {
        self.out.resolve("lifetime");
        let mut profile = profile_by_name(&self.tech)?;
        if let Some(rate) = self.data_rate {
            profile.data_rate_bps = rate;
        }
        let mut csv = String::from("tech,ti,fraction,years\n");
        for &ti in &self.ti {
            for &fraction in &self.fractions {
                let traffic = TrafficModel {
                    ti,
                    payload_full_bytes: self.payload_bytes,
                    data_fraction: fraction,
                    battery_joules: self.battery_joules,
                    overhead_bytes: self.overhead_bytes,
                };
                let years = lifetime_years(&profile, &traffic)?;
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    profile.name,
                    format_float(ti),
                    format_float(fraction),
                    format_float(years),
                );
            }
        }
        let mut outputs = Outputs::new(&self.out);
        outputs.add("curve.csv", csv);
        let manifest = make_manifest("lifetime", &self, &None, None)?;
        outputs.add_manifest(&manifest)?;
        outputs.commit()
    }
}

// ---------------------------------------------------------------------------
// compare-forecasters

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
struct CompareCmd {
    /// Stream lengths to time
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    n: Vec<usize>,

    /// Timed repetitions per length; the median is reported
    #[arg(long, default_value_t = 3)]
    reps: usize,

    /// Window size for the window scheme
    #[arg(long, default_value_t = 5)]
    window: usize,

    /// AR order for the refitting scheme
    #[arg(long, default_value_t = 3)]
    ar_order: usize,

    /// Trailing fit window for the refitting scheme
    #[arg(long, default_value_t = 50)]
    fit_window: usize,

    /// Refit cadence in samples for the AR scheme
    #[arg(long, default_value_t = 1)]
    refit_every: usize,

    #[command(flatten)]
    out: OutputOpts,
}

impl CompareCmd {
    fn run(mut self) -> Result<()> {
        self.out.resolve("compare");
        if self.n.is_empty() {
            return Err(Error::InvalidConfig("need at least one --n value".into()));
        }
        if self.n.iter().any(|&n| n < 1000) {
            eprintln!("warning: n < 1000 gives noisy per-sample timings");
        }
        let window_kind = ForecasterKind::window(self.window);
        let arima_kind = ForecasterKind::Arima {
            p: self.ar_order,
            fit_window: self.fit_window,
            refit_every: Some(self.refit_every),
        };
        // Fail on bad parameters before spending time on measurement.
        window_kind.build()?;
        arima_kind.build()?;

        let mut csv = String::from("n,window_s_per_sample,arima_s_per_sample,ratio\n");
        for &n in &self.n {
            let t_window =
                measure_throughput(|| window_kind.build().expect("validated"), n, self.reps);
            let t_arima =
                measure_throughput(|| arima_kind.build().expect("validated"), n, self.reps);
            let ratio = t_arima / t_window;
            let _ = writeln!(
                csv,
                "{n},{:e},{:e},{}",
                t_window,
                t_arima,
                format_float(ratio)
            );
            println!("n={n}: window {t_window:.3e} s/sample, arima {t_arima:.3e} s/sample, ratio {ratio:.1}");
        }
        let mut outputs = Outputs::new(&self.out);
        outputs.add("timing.csv", csv);
        let manifest = make_manifest("compare-forecasters", &self, &None, None)?;
        outputs.add_manifest(&manifest)?;
        outputs.commit()
    }
}

// ---------------------------------------------------------------------------
// displacement

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
struct DisplacementCmd {
    #[command(flatten)]
    input: InputOpts,

    #[command(flatten)]
    forecast: ForecastOpts,

    /// Thresholds at which to compare displacement curves
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,1", value_parser = parse_float)]
    deltas: Vec<f64>,

    #[command(flatten)]
    out: OutputOpts,
}

impl DisplacementCmd {
    fn run(mut self) -> Result<()> {
        self.out.resolve("displacement");
        let accel = self.input.load()?;

        let mut csv = String::from("delta,index,displacement_true,displacement_processed\n");
        let mut report = Vec::with_capacity(self.deltas.len());
        for &delta in &self.deltas {
            let config = ProtocolConfig::new(self.forecast.kind(), delta)?;
            let impact = displacement_impact(&accel, &config)?;
            for (i, (st, sp)) in impact
                .displacement_true
                .iter()
                .zip(&impact.displacement_processed)
                .enumerate()
            {
                let _ = writeln!(
                    csv,
                    "{},{i},{},{}",
                    format_float(delta),
                    format_float(*st),
                    format_float(*sp)
                );
            }
            println!(
                "delta {}: sent {}%, displacement mse {} m^2",
                format_float(delta),
                format_float(impact.data_sent_pct),
                format_float(impact.mse_displacement),
            );
            report.push(serde_json::json!({
                "delta": delta,
                "data_sent_pct": impact.data_sent_pct,
                "mse_displacement": impact.mse_displacement,
            }));
        }
        let mut outputs = Outputs::new(&self.out);
        outputs.add("curves.csv", csv);
        outputs.add("report.json", serde_json::to_string_pretty(&report)? + "\n");
        let manifest =
            make_manifest("displacement", &self, &self.input.input, self.input.manifest_seed())?;
        outputs.add_manifest(&manifest)?;
        outputs.commit()
    }
}

// ---------------------------------------------------------------------------
// rerun

#[derive(Debug, Clone, Parser)]
struct RerunCmd {
    /// Manifest emitted by a previous run
    #[arg(long)]
    manifest: PathBuf,
}

impl RerunCmd {
    fn run(self) -> Result<()> {
        let manifest = RunManifest::load(&self.manifest)?;
        let config = manifest.config.clone();
        match manifest.subcommand.as_str() {
            "simulate" => serde_json::from_value::<SimulateCmd>(config)?.run(),
            "sweep" => serde_json::from_value::<SweepCmd>(config)?.run(),
            "anomaly" => serde_json::from_value::<AnomalyCmd>(config)?.run(),
            "lifetime" => serde_json::from_value::<LifetimeCmd>(config)?.run(),
            "compare-forecasters" => serde_json::from_value::<CompareCmd>(config)?.run(),
            "displacement" => serde_json::from_value::<DisplacementCmd>(config)?.run(),
            other => Err(Error::InvalidConfig(format!(
                "manifest names unknown subcommand {other:?}"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------

/// 1 for configuration/input problems, 2 for failures mid-run.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EmptySeries
        | Error::NonFiniteValue { .. }
        | Error::CsvParse { .. }
        | Error::MissingColumn(_)
        | Error::AnomalyIndexOutOfRange { .. }
        | Error::SeriesTooShort { .. }
        | Error::ChannelSaturated { .. }
        | Error::InvalidConfig(_)
        | Error::UnknownTech { .. } => 1,
        _ => 2,
    }
}

fn ensure_input_exists(cmd: &Cmd) -> Result<()> {
    // Surface missing-input errors before any work; keeps classification
    // (validation vs runtime) independent of subcommand internals.
    let input = match cmd {
        Cmd::Simulate(c) => &c.input.input,
        Cmd::Sweep(c) => &c.input.input,
        Cmd::Anomaly(c) => &c.input.input,
        Cmd::Displacement(c) => &c.input.input,
        _ => &None,
    };
    if let Some(path) = input {
        if !Path::new(path).is_file() {
            return Err(Error::InvalidConfig(format!(
                "input file {} not found",
                path.display()
            )));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are successes; anything else is a validation
            // failure (exit 1 by this tool's convention).
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = ensure_input_exists(&cli.cmd) {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    match cli.cmd.run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
