//! `cellmode`: transportation-mode detection from serving-cell traces.
//!
//! Subcommands compose through files:
//!
//! ```text
//! simulate -> trace.csv -> smooth -> features -> instances.csv
//!     -> train -> model.txt -> predict / eval -> report
//! ```
//!
//! Every subcommand is deterministic given its flags and seeds. Exit codes:
//! 0 success, 1 usage error, 2 data or validation error.

mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cellmode_core::classifier::{self, DecisionTree, TreeParams};
use cellmode_core::eval::{self, ReportFormat};
use cellmode_core::features;
use cellmode_core::ingest;
use cellmode_core::preprocess::{smooth_pingpong, SmoothingParams};
use cellmode_core::synth::{self, PathLossParams, SuiteParams};
use cellmode_core::trace::{validate_trace, FeatureVector, Mode, Trace};

use config::{resolve, RunConfig};

#[derive(Parser)]
#[command(
    name = "cellmode",
    version,
    about = "Detects stationary / walking / driving from serving-cell traces"
)]
struct Cli {
    /// JSON config file; explicit flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a trace file, check its invariants, and print a summary
    Ingest {
        /// Trace CSV file
        trace: PathBuf,
    },
    /// Remove ping-pong handoff noise from the serving-cell stream
    Smooth {
        /// Trace CSV file
        trace: PathBuf,
        /// Output trace CSV
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Longest foreign run to replace, samples [default: 2]
        #[arg(long)]
        max_gap: Option<usize>,
        /// Run length that makes a flanking cell dominant, samples [default: 3]
        #[arg(long)]
        min_flank: Option<usize>,
    },
    /// Extract feature instances from a (smoothed) trace
    Features {
        /// Trace CSV file
        trace: PathBuf,
        /// Output instances CSV
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Comma-separated window sizes in seconds; each must divide the
        /// largest [default: 10,30,60]
        #[arg(long, value_delimiter = ',')]
        windows: Option<Vec<u32>>,
    },
    /// Train a decision tree on labeled instances
    Train {
        /// Instance CSV files (concatenated)
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Output model file
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        tree: TreeFlags,
        /// Reserved for future stochastic training [default: 42]
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Predict modes for instances with a trained model
    Predict {
        /// Model file from `train`
        model: PathBuf,
        /// Instance CSV files (concatenated)
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Output predictions CSV (stdout when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Cross-validate a tree on labeled instances and report metrics
    Eval {
        /// Instance CSV files (concatenated)
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Number of folds [default: 5]
        #[arg(long)]
        k: Option<usize>,
        /// Shuffle seed [default: 42]
        #[arg(long)]
        seed: Option<u64>,
        /// Report format: text or json [default: text]
        #[arg(long)]
        format: Option<String>,
        /// Stratify folds by class [default: off]
        #[arg(long)]
        stratified: bool,
        #[command(flatten)]
        tree: TreeFlags,
        /// Output file (stdout when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Generate synthetic labeled traces from the path-loss model
    Simulate {
        /// Transportation mode: stationary, walking, or driving
        /// [default: walking]
        #[arg(long)]
        mode: Option<String>,
        /// Trace duration in seconds [default: 600]
        #[arg(long)]
        duration_s: Option<u32>,
        /// Side of the square simulation area, meters [default: 1200]
        #[arg(long)]
        extent_m: Option<f64>,
        /// Tower grid pitch, meters [default: 500]
        #[arg(long)]
        spacing_m: Option<f64>,
        /// Tower jitter as a fraction of spacing, in [0, 0.5) [default: 0.4]
        #[arg(long)]
        jitter_frac: Option<f64>,
        /// Path loss exponent [default: 3]
        #[arg(long)]
        alpha: Option<f64>,
        /// Log-normal shadowing sigma, dB [default: 6]
        #[arg(long)]
        shadow_sigma: Option<f64>,
        /// Handoff hysteresis margin, dB [default: 4]
        #[arg(long)]
        hysteresis_db: Option<f64>,
        /// Reference power at d0, dBm [default: -40]
        #[arg(long)]
        p0_dbm: Option<f64>,
        /// Reference distance, meters [default: 1]
        #[arg(long)]
        d0_m: Option<f64>,
        /// Shadowing decorrelation distance, meters [default: 50]
        #[arg(long)]
        decorrelation_m: Option<f64>,
        /// Master seed [default: 42]
        #[arg(long)]
        seed: Option<u64>,
        /// Output trace CSV (single-trace mode)
        #[arg(long, value_name = "FILE", conflicts_with_all = ["suite", "out_dir"])]
        out: Option<PathBuf>,
        /// Emit N traces per mode instead of a single trace
        #[arg(long, value_name = "N", requires = "out_dir")]
        suite: Option<usize>,
        /// Directory for suite traces (<mode>_<index>.csv)
        #[arg(long, value_name = "DIR", requires = "suite")]
        out_dir: Option<PathBuf>,
    },
    /// Re-render a JSON metrics report
    Report {
        /// Metrics JSON produced by `eval --format json`
        metrics: PathBuf,
        /// Report format: text or json [default: text]
        #[arg(long)]
        format: Option<String>,
    },
}

/// Decision-tree flags shared by `train` and `eval`.
#[derive(Args)]
struct TreeFlags {
    /// Maximum tree depth in edges [default: 12]
    #[arg(long)]
    max_depth: Option<usize>,
    /// Minimum training instances per leaf [default: 5]
    #[arg(long)]
    min_leaf: Option<usize>,
    /// Minimum node size to attempt a split [default: 10]
    #[arg(long)]
    min_split: Option<usize>,
}

/// Errors mapped onto exit codes.
enum CliError {
    /// Exit code 1: the invocation itself is wrong.
    Usage(String),
    /// Exit code 2: the data cannot be processed as requested.
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

macro_rules! impl_data_error {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}
impl_data_error!(
    std::io::Error,
    ingest::ParseError,
    classifier::TrainError,
    classifier::ModelError,
    eval::EvalError,
    synth::SynthError,
    features::WindowConfigError
);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let run_config = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(config) => config,
            Err(message) => {
                eprintln!("error: {message}");
                return ExitCode::from(1);
            }
        },
        None => RunConfig::default(),
    };

    match run(cli.command, &run_config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run(command: Command, config: &RunConfig) -> Result<(), CliError> {
    match command {
        Command::Ingest { trace } => cmd_ingest(&trace),
        Command::Smooth {
            trace,
            out,
            max_gap,
            min_flank,
        } => {
            let defaults = SmoothingParams::default();
            let params = SmoothingParams {
                max_gap: resolve(max_gap, config.max_gap, defaults.max_gap),
                min_flank: resolve(min_flank, config.min_flank, defaults.min_flank),
            };
            cmd_smooth(&trace, &out, &params)
        }
        Command::Features {
            trace,
            out,
            windows,
        } => {
            let windows = resolve(
                windows,
                config.window_sizes.clone(),
                features::WINDOW_SIZES_S.to_vec(),
            );
            cmd_features(&trace, &out, &windows)
        }
        Command::Train {
            instances,
            out,
            tree,
            seed,
        } => {
            let params = tree_params(&tree, config);
            let seed = resolve(seed, config.seed, 42);
            cmd_train(&instances, &out, &params, seed)
        }
        Command::Predict {
            model,
            instances,
            out,
        } => cmd_predict(&model, &instances, out.as_deref()),
        Command::Eval {
            instances,
            k,
            seed,
            format,
            stratified,
            tree,
            out,
        } => {
            let params = tree_params(&tree, config);
            let k = resolve(k, config.k, 5);
            let seed = resolve(seed, config.seed, 42);
            let stratified = stratified || config.stratified.unwrap_or(false);
            let format = parse_format(format.as_deref())?;
            cmd_eval(&instances, k, seed, &params, stratified, format, out.as_deref())
        }
        Command::Simulate {
            mode,
            duration_s,
            extent_m,
            spacing_m,
            jitter_frac,
            alpha,
            shadow_sigma,
            hysteresis_db,
            p0_dbm,
            d0_m,
            decorrelation_m,
            seed,
            out,
            suite,
            out_dir,
        } => {
            let loss_defaults = PathLossParams::default();
            let suite_defaults = SuiteParams::default();
            let params = SuiteParams {
                traces_per_mode: suite.unwrap_or(1),
                duration_s: resolve(duration_s, config.duration_s, suite_defaults.duration_s),
                extent_m: resolve(extent_m, config.extent_m, suite_defaults.extent_m),
                spacing_m: resolve(spacing_m, config.spacing_m, suite_defaults.spacing_m),
                jitter_frac: resolve(jitter_frac, config.jitter_frac, suite_defaults.jitter_frac),
                hysteresis_db: resolve(
                    hysteresis_db,
                    config.hysteresis_db,
                    suite_defaults.hysteresis_db,
                ),
                path_loss: PathLossParams {
                    p0_dbm: resolve(p0_dbm, config.p0_dbm, loss_defaults.p0_dbm),
                    d0_m: resolve(d0_m, config.d0_m, loss_defaults.d0_m),
                    alpha: resolve(alpha, config.alpha, loss_defaults.alpha),
                    shadow_sigma_db: resolve(
                        shadow_sigma,
                        config.shadow_sigma_db,
                        loss_defaults.shadow_sigma_db,
                    ),
                    decorrelation_m: resolve(
                        decorrelation_m,
                        config.decorrelation_m,
                        loss_defaults.decorrelation_m,
                    ),
                },
                seed: resolve(seed, config.seed, suite_defaults.seed),
            };
            match (suite, out, out_dir) {
                (Some(n), None, Some(dir)) => cmd_simulate_suite(&params, n, &dir),
                (None, Some(file), None) => {
                    let mode = parse_mode(
                        resolve(mode, config.mode.clone(), "walking".to_string()).as_str(),
                    )?;
                    cmd_simulate_one(&params, mode, &file)
                }
                _ => Err(CliError::Usage(
                    "simulate needs either --out <FILE> or --suite <N> --out-dir <DIR>"
                        .to_string(),
                )),
            }
        }
        Command::Report { metrics, format } => {
            let format = parse_format(format.as_deref())?;
            cmd_report(&metrics, format)
        }
    }
}

fn tree_params(flags: &TreeFlags, config: &RunConfig) -> TreeParams {
    let defaults = TreeParams::default();
    TreeParams {
        max_depth: resolve(flags.max_depth, config.max_depth, defaults.max_depth),
        min_leaf: resolve(flags.min_leaf, config.min_leaf, defaults.min_leaf),
        min_split: resolve(flags.min_split, config.min_split, defaults.min_split),
    }
}

fn parse_format(format: Option<&str>) -> Result<ReportFormat, CliError> {
    match format.unwrap_or("text") {
        "text" => Ok(ReportFormat::Text),
        "json" => Ok(ReportFormat::Json),
        other => Err(CliError::Usage(format!(
            "unknown format {other:?} (expected text or json)"
        ))),
    }
}

fn parse_mode(mode: &str) -> Result<Mode, CliError> {
    mode.parse()
        .map_err(|e: cellmode_core::trace::ParseModeError| CliError::Usage(e.to_string()))
}

fn read_trace(path: &Path) -> Result<Trace, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    ingest::parse_trace(BufReader::new(file))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_with<F>(path: &Path, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
{
    let file = File::create(path)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", path.display())))?;
    let mut writer = BufWriter::new(file);
    write(&mut writer)?;
    writer.flush()?;
    Ok(())
}

fn read_instance_files(paths: &[PathBuf]) -> Result<Vec<FeatureVector>, CliError> {
    let mut instances = Vec::new();
    for path in paths {
        let file = File::open(path)
            .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
        let mut batch = ingest::read_instances(BufReader::new(file))
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        instances.append(&mut batch);
    }
    Ok(instances)
}

/// Drops unlabeled instances, reporting how many were skipped.
fn labeled_only(instances: Vec<FeatureVector>) -> Vec<FeatureVector> {
    let total = instances.len();
    let labeled: Vec<FeatureVector> =
        instances.into_iter().filter(|i| i.label.is_some()).collect();
    if labeled.len() < total {
        eprintln!(
            "note: skipped {} unlabeled instance(s) of {total}",
            total - labeled.len()
        );
    }
    labeled
}

fn cmd_ingest(path: &Path) -> Result<(), CliError> {
    let trace = read_trace(path)?;
    let span_s = match (trace.samples.first(), trace.samples.last()) {
        (Some(first), Some(last)) => (last.timestamp_ms - first.timestamp_ms) as f64 / 1000.0,
        _ => 0.0,
    };
    println!(
        "{}: {} samples over {span_s:.0} s, {} ground-truth segment(s)",
        path.display(),
        trace.len(),
        trace.segments.len()
    );
    for segment in &trace.segments {
        println!(
            "  [{} .. {}] {}",
            segment.start_ms, segment.end_ms, segment.mode
        );
    }
    let violations = validate_trace(&trace);
    if violations.is_empty() {
        println!("trace is valid");
        Ok(())
    } else {
        for violation in &violations {
            eprintln!("violation: {violation}");
        }
        Err(CliError::Data(format!(
            "{} invariant violation(s)",
            violations.len()
        )))
    }
}

fn cmd_smooth(path: &Path, out: &Path, params: &SmoothingParams) -> Result<(), CliError> {
    let trace = read_trace(path)?;
    let smoothed = smooth_pingpong(&trace, params);
    write_with(out, |w| Ok(ingest::write_trace(&smoothed, w)?))?;
    let changed = trace
        .samples
        .iter()
        .zip(&smoothed.samples)
        .filter(|(a, b)| a.cell_id != b.cell_id)
        .count();
    eprintln!(
        "smoothed {}: {changed} of {} samples rewritten",
        path.display(),
        trace.len()
    );
    Ok(())
}

fn cmd_features(path: &Path, out: &Path, windows: &[u32]) -> Result<(), CliError> {
    let trace = read_trace(path)?;
    let instances = features::extract_instances_windows(&trace, windows)?;
    let dims = windows.len() * 2 * features::FEATURES_PER_WINDOW_SCALE;
    write_with(out, |w| Ok(ingest::write_instances(&instances, dims, w)?))?;
    eprintln!(
        "extracted {} instance(s) from {}",
        instances.len(),
        path.display()
    );
    Ok(())
}

fn cmd_train(
    paths: &[PathBuf],
    out: &Path,
    params: &TreeParams,
    seed: u64,
) -> Result<(), CliError> {
    let instances = labeled_only(read_instance_files(paths)?);
    let tree = classifier::train(&instances, params, seed)?;
    write_with(out, |w| Ok(tree.save(w)?))?;
    eprintln!(
        "trained on {} instance(s): {} nodes, depth {}",
        instances.len(),
        tree.node_count(),
        tree.depth()
    );
    Ok(())
}

fn cmd_predict(
    model_path: &Path,
    instance_paths: &[PathBuf],
    out: Option<&Path>,
) -> Result<(), CliError> {
    let file = File::open(model_path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", model_path.display())))?;
    let tree = DecisionTree::load(BufReader::new(file))?;
    let instances = read_instance_files(instance_paths)?;

    let mut text = String::from("window_start_ms,predicted,label\n");
    for instance in &instances {
        let predicted = tree.predict(&instance.features)?;
        let label = instance.label.map(|m| m.as_str()).unwrap_or("");
        text.push_str(&format!(
            "{},{},{}\n",
            instance.window_start_ms, predicted, label
        ));
    }
    match out {
        Some(path) => write_with(path, |w| Ok(w.write_all(text.as_bytes())?)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    paths: &[PathBuf],
    k: usize,
    seed: u64,
    params: &TreeParams,
    stratified: bool,
    format: ReportFormat,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let instances = labeled_only(read_instance_files(paths)?);
    let matrix = eval::cross_validate_opts(&instances, k, params, seed, stratified)?;
    let report = eval::metrics(&matrix)?;
    let rendered = eval::render_report(&report, format);
    match out {
        Some(path) => write_with(path, |w| Ok(w.write_all(rendered.as_bytes())?)),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn cmd_simulate_one(params: &SuiteParams, mode: Mode, out: &Path) -> Result<(), CliError> {
    let trace = synth::generate_trace(params, mode)?;
    write_with(out, |w| Ok(ingest::write_trace(&trace, w)?))?;
    eprintln!(
        "simulated {} trace: {} samples -> {}",
        mode,
        trace.len(),
        out.display()
    );
    Ok(())
}

fn cmd_simulate_suite(params: &SuiteParams, n: usize, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
    let traces = synth::generate_suite(params)?;
    for (index, trace) in traces.iter().enumerate() {
        let mode = trace.segments[0].mode;
        let path = dir.join(format!("{}_{:03}.csv", mode, index % n));
        write_with(&path, |w| Ok(ingest::write_trace(trace, w)?))?;
    }
    eprintln!("wrote {} traces to {}", traces.len(), dir.display());
    Ok(())
}

fn cmd_report(path: &Path, format: ReportFormat) -> Result<(), CliError> {
    let mut text = String::new();
    File::open(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?
        .read_to_string(&mut text)?;
    let report = eval::report_from_json(&text)?;
    print!("{}", eval::render_report(&report, format));
    Ok(())
}
