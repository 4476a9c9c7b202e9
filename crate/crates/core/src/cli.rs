//! The `regbench` command line.
//!
//! Exit codes: 0 success, 1 usage or environment error, 2 when a benchmark
//! finished but at least one case failed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::adapters::{calibrate_machine_factor, run_mock, MockExit, MockKind, MockRequest};
use crate::dataset::{
    generate_pairs, load_manifest, parse_landmark_file, read_image_geometry, write_pairing_table,
};
use crate::metrics::CaseStatus;
use crate::report::{read_metrics_csv, render_case_overlay, ChartKind, LabeledMetrics, Metric};
use crate::runner::{
    self, evaluate_case, load_config, read_results, BenchmarkConfig,
    Experiment,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CASE_FAILURES: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "regbench", version, about = "Landmark-based benchmark harness for image registration methods")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a dataset manifest: files exist, landmarks parse, counts agree.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
        /// Scope used to expand path tokens; default checks every listed scope.
        #[arg(long)]
        scope: Option<String>,
    },
    /// Write the registration pairs of a manifest as a pairing table.
    Pair {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "full")]
        scope: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a method over a dataset, then evaluate and summarise.
    Run(RunArgs),
    /// Recompute metrics and summaries of a finished experiment.
    Evaluate {
        experiment: PathBuf,
        /// Also render the chart suite.
        #[arg(long)]
        visual: bool,
    },
    /// Render charts from one or more evaluated experiments.
    Report {
        #[arg(required = true)]
        experiments: Vec<PathBuf>,
        /// overlay, boxplot, radar, distribution or tissue-bars; repeatable.
        #[arg(long = "chart")]
        charts: Vec<ChartKindArg>,
        /// MrTRE, SrTRE, robustness or time; repeatable.
        #[arg(long = "metric")]
        metrics: Vec<MetricArg>,
        /// Output directory; defaults to the experiment's summary/ folder
        /// for a single experiment.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in registrar with known behaviour, used as an adapter command.
    #[command(hide = true)]
    Mock(MockArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML file with run settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub adapter: Option<PathBuf>,
    #[arg(long, conflicts_with = "pairs")]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Root folder for experiment directories.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub scope: Option<String>,
    #[arg(long, env = "REGBENCH_WORKERS")]
    pub workers: Option<usize>,
    /// Per-case limit in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Seconds between SIGTERM and SIGKILL for a case over its limit.
    #[arg(long)]
    pub grace: Option<f64>,
    /// Time normalisation factor, or "auto" to measure this machine.
    #[arg(long)]
    pub machine_factor: Option<String>,
    /// Experiment directory name instead of <method>_<timestamp>.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub resume: bool,
    #[arg(long)]
    pub visual: bool,
    #[arg(long)]
    pub keep_debug: bool,
    /// Require every file of a pairing table to exist before starting.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct MockArgs {
    pub kind: String,
    #[arg(long, default_value = "")]
    pub fixed: String,
    #[arg(long, default_value = "")]
    pub moving: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub case_id: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub delay_ms: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct ChartKindArg(pub ChartKind);

impl std::str::FromStr for ChartKindArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(ChartKindArg).map_err(|e: crate::report::ReportError| e.to_string())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MetricArg(pub Metric);

impl std::str::FromStr for MetricArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(MetricArg).map_err(|e: crate::report::ReportError| e.to_string())
    }
}

fn fail(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_ERROR
}

fn cmd_validate(path: &Path, scope: Option<&str>) -> i32 {
    let manifest = match load_manifest(path) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    if manifest.samples.is_empty() {
        return fail(format!("{}: manifest lists no samples", path.display()));
    }
    let mut problems = Vec::new();
    let mut pairs = 0;
    for sample in &manifest.samples {
        let scopes: Vec<String> = match scope {
            Some(s) => vec![s.to_string()],
            None if sample.scale_percent.is_empty() => vec!["full".into()],
            None => sample.scale_percent.keys().cloned().collect(),
        };
        for sc in &scopes {
            let entries = match sample.images_for(sc) {
                Ok(e) => e,
                Err(e) => {
                    problems.push(e.to_string());
                    continue;
                }
            };
            let mut counts = Vec::new();
            for e in &entries {
                if !e.image.is_file() {
                    problems.push(format!("missing image {}", e.image.display()));
                } else if e.size().is_none() {
                    if let Err(err) = read_image_geometry(&e.image) {
                        problems.push(err.to_string());
                    }
                }
                match parse_landmark_file(&e.landmarks) {
                    Ok(set) => counts.push(set.len().to_string()),
                    Err(err) => {
                        counts.push("?".into());
                        problems.push(err.to_string());
                    }
                }
            }
            let distinct: std::collections::BTreeSet<&String> = counts.iter().collect();
            let note = if distinct.len() > 1 { " (counts differ; pairs use the common prefix)" } else { "" };
            println!(
                "{} [{}] scope {sc}: {} images, landmarks {}{note}",
                sample.sample_name,
                sample.tissue_type,
                entries.len(),
                counts.join("/"),
            );
        }
        pairs += sample.images.len() * sample.images.len().saturating_sub(1) / 2;
    }
    println!("{} samples, {pairs} pairs", manifest.samples.len());
    if problems.is_empty() {
        EXIT_OK
    } else {
        for p in &problems {
            eprintln!("error: {p}");
        }
        EXIT_ERROR
    }
}

fn cmd_pair(manifest: &Path, scope: &str, out: &Path) -> i32 {
    let manifest = match load_manifest(manifest) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let cases = match generate_pairs(&manifest.samples, scope) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    for s in manifest.samples.iter().filter(|s| s.images.len() < 2) {
        log::warn!("sample {} has a single image and yields no pairs", s.sample_name);
    }
    if let Err(e) = write_pairing_table(&cases, out) {
        return fail(e);
    }
    println!("{} pairs written to {}", cases.len(), out.display());
    EXIT_OK
}

fn build_config(args: &RunArgs) -> Result<BenchmarkConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path).map_err(|e| e.to_string())?,
        None => {
            let adapter = args.adapter.clone().ok_or("--adapter is required")?;
            let source = args
                .pairs
                .clone()
                .or_else(|| args.manifest.clone())
                .ok_or("--manifest or --pairs is required")?;
            let out = args.out.clone().ok_or("--out is required")?;
            BenchmarkConfig::new(adapter, source, out)
        }
    };
    if let Some(a) = &args.adapter {
        cfg.adapter_spec = a.clone();
    }
    if let Some(s) = args.pairs.as_ref().or(args.manifest.as_ref()) {
        cfg.cases_source = s.clone();
    }
    if let Some(o) = &args.out {
        cfg.experiment_root = o.clone();
    }
    if let Some(s) = &args.scope {
        cfg.scope = s.clone();
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(t) = args.timeout {
        cfg.timeout_s = t;
    }
    if let Some(g) = args.grace {
        cfg.grace_s = g;
    }
    if let Some(f) = &args.machine_factor {
        cfg.machine_factor = if f == "auto" {
            let f = calibrate_machine_factor();
            log::info!("measured machine factor {f:.3}");
            f
        } else {
            f.parse().map_err(|_| format!("invalid --machine-factor {f:?}"))?
        };
    }
    if args.name.is_some() {
        cfg.experiment_name = args.name.clone();
    }
    cfg.resume |= args.resume;
    cfg.visual_reports |= args.visual;
    cfg.keep_debug |= args.keep_debug;
    cfg.strict_paths |= args.strict;
    Ok(cfg)
}

fn cmd_run(args: &RunArgs) -> i32 {
    let cfg = match build_config(args) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match runner::run_benchmark(&cfg) {
        Ok(outcome) => {
            let failed = outcome.run.failure_count();
            println!("{}", outcome.experiment.dir.display());
            println!(
                "{} cases ({} run now), {failed} not completed",
                outcome.run.table.len(),
                outcome.run.executed.len()
            );
            if failed > 0 {
                EXIT_CASE_FAILURES
            } else {
                EXIT_OK
            }
        }
        Err(e) => fail(e),
    }
}

fn cmd_evaluate(dir: &Path, visual: bool) -> i32 {
    if !dir.join(runner::RESULTS_FILE).is_file() {
        return fail(format!("{}: no results table", dir.display()));
    }
    let mut exp = match Experiment::open(dir) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    exp.config.visual_reports |= visual;
    match runner::evaluate_experiment(&exp) {
        Ok(summaries) => {
            for s in summaries {
                println!(
                    "{} {}: {} cases, {} failed, AMrTRE {:.4}%, robustness {:.2}%",
                    s.method,
                    s.scope,
                    s.case_count,
                    s.failure_count,
                    s.avg_median_rtre * 100.0,
                    s.avg_robustness * 100.0
                );
            }
            EXIT_OK
        }
        Err(e) => fail(e),
    }
}

fn render_overlays(dir: &Path) -> Result<usize, String> {
    let exp = Experiment::open(dir).map_err(|e| e.to_string())?;
    let table = read_results(&exp.results_path()).map_err(|e| e.to_string())?;
    let cases = runner::load_experiment_cases(&exp).map_err(|e| e.to_string())?;
    let mut written = 0;
    for row in &table {
        let Some(case) = cases.iter().find(|c| c.case_id == row.case_id) else {
            continue;
        };
        let warped = match row.status {
            CaseStatus::Completed => row.warped_landmarks.as_deref().and_then(|p| parse_landmark_file(p).ok()),
            _ => None,
        };
        let status = if row.status == CaseStatus::Completed && warped.is_none() {
            CaseStatus::Failed
        } else {
            row.status
        };
        if let Ok(Some(ev)) = evaluate_case(case, status, warped, Default::default()) {
            let svg = render_case_overlay(case, &ev.fixed, &ev.moving, &ev.warped, &ev.geometry)
                .map_err(|e| e.to_string())?;
            let p = exp.workspace(case.case_id).join("overlay.svg");
            std::fs::create_dir_all(exp.workspace(case.case_id)).map_err(|e| e.to_string())?;
            std::fs::write(&p, svg).map_err(|e| format!("{}: {e}", p.display()))?;
            written += 1;
        }
    }
    Ok(written)
}

fn cmd_report(dirs: &[PathBuf], charts: &[ChartKind], metrics: &[Metric], out: Option<&Path>) -> i32 {
    let mut records: Vec<LabeledMetrics> = Vec::new();
    for dir in dirs {
        let path = dir.join(runner::SUMMARY_DIR).join("metrics.csv");
        if !path.is_file() {
            return fail(format!("{}: no metrics; run `regbench evaluate` first", dir.display()));
        }
        match read_metrics_csv(&path) {
            Ok(r) => records.extend(r),
            Err(e) => return fail(e),
        }
    }
    if records.is_empty() {
        return fail("no metric records");
    }
    let out_dir = match (out, dirs) {
        (Some(o), _) => o.to_path_buf(),
        (None, [single]) => single.join(runner::SUMMARY_DIR),
        (None, _) => return fail("--out is required when combining several experiments"),
    };
    let metrics = if metrics.is_empty() { Metric::ALL.to_vec() } else { metrics.to_vec() };
    let charts = if charts.is_empty() {
        let scopes: std::collections::BTreeSet<&str> = records.iter().map(|r| r.scope.as_str()).collect();
        let mut c = vec![ChartKind::Radar, ChartKind::Boxplot, ChartKind::TissueBars];
        if scopes.len() > 1 {
            c.push(ChartKind::Distribution);
        }
        c
    } else {
        charts.to_vec()
    };
    if charts.contains(&ChartKind::Overlay) {
        for dir in dirs {
            match render_overlays(dir) {
                Ok(n) => println!("{n} overlays in {}", dir.join(runner::CASES_DIR).display()),
                Err(e) => return fail(e),
            }
        }
    }
    match runner::write_report(&records, &out_dir, &charts, &metrics) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            EXIT_OK
        }
        Err(e) => fail(e),
    }
}

fn cmd_mock(args: &MockArgs) -> i32 {
    let kind: MockKind = match args.kind.parse() {
        Ok(k) => k,
        Err(e) => return fail(e),
    };
    let path = |s: &str| (!s.is_empty()).then(|| PathBuf::from(s));
    let req = MockRequest {
        fixed_landmarks: path(&args.fixed),
        moving_landmarks: path(&args.moving),
        output: args.out.clone(),
        case_id: args.case_id,
        seed: args.seed,
        delay: Duration::from_millis(args.delay_ms),
    };
    match run_mock(&kind, &req) {
        Ok(MockExit::Success) => EXIT_OK,
        Ok(MockExit::Crash(code)) => {
            eprintln!("mock registrar crashed on purpose");
            code
        }
        Err(e) => fail(e),
    }
}

pub fn execute(cli: &Cli) -> i32 {
    match &cli.command {
        Command::Validate { manifest, scope } => cmd_validate(manifest, scope.as_deref()),
        Command::Pair { manifest, scope, out } => cmd_pair(manifest, scope, out),
        Command::Run(args) => cmd_run(args),
        Command::Evaluate { experiment, visual } => cmd_evaluate(experiment, *visual),
        Command::Report {
            experiments,
            charts,
            metrics,
            out,
        } => {
            let charts: Vec<ChartKind> = charts.iter().map(|c| c.0).collect();
            let metrics: Vec<Metric> = metrics.iter().map(|m| m.0).collect();
            cmd_report(experiments, &charts, &metrics, out.as_deref())
        }
        Command::Mock(args) => cmd_mock(args),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    execute(&cli)
}

pub fn main() -> i32 {
    run_from(std::env::args_os())
}

/// Lets any program act as the mock registrar: when its first argument is
/// `mock`, this runs the mock and exits. Examples call it first thing so
/// they can hand their own executable to [`mock_adapter_spec`].
///
/// [`mock_adapter_spec`]: crate::adapters::mock_adapter_spec
pub fn serve_mock_if_invoked() {
    let args: Vec<OsString> = std::env::args_os().collect();
    if args.get(1).is_some_and(|a| a == "mock") {
        std::process::exit(run_from(args));
    }
}
