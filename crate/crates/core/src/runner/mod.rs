//! The benchmark workflow: prepare an experiment directory, load the cases,
//! execute them, evaluate and export summaries.

mod config;
mod evaluate;
mod execute;
mod experiment;
mod table;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::adapters::AdapterError;
use crate::dataset::{
    generate_pairs, load_manifest, load_pairing_table, write_pairing_table, DatasetError,
    RegistrationCase,
};
use crate::metrics::{DatasetSummary, MetricsError};
use crate::report::ReportError;

pub use config::{load_config, BenchmarkConfig};
pub use evaluate::{
    evaluate_all, evaluate_case, export_summary, label_metrics, read_summary, summarize,
    write_report, EvaluatedCase,
};
pub use execute::{run_all, run_case, RunReport};
pub use experiment::{
    prepare_environment, Experiment, ADAPTER_FILE, CASES_DIR, CASES_FILE, CONFIG_DIR, CONFIG_FILE,
    SUMMARY_DIR,
};
pub use table::{
    create_table, detect_completed, read_results, repair_table, scan_table, ResultRow,
    ResultsSink, TableScan, RESULTS_FILE, RESULTS_HEADER,
};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot create experiment directory under {path}: {source}")]
    RootNotWritable { path: PathBuf, source: std::io::Error },
    #[error("experiment directory {0} exists; pass resume to continue it")]
    ExistsWithoutResume(PathBuf),
    #[error("no registration cases in {0}")]
    EmptyCaseList(PathBuf),
    #[error("results table {0} not found")]
    MissingTable(PathBuf),
    #[error("results table {path} is unreadable: {reason}")]
    TableUnreadable { path: PathBuf, reason: String },
    #[error("no evaluated cases to summarise")]
    EmptyGroup,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunnerError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunnerError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = RunnerError> = std::result::Result<T, E>;

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

/// Cases from a pairing table (`.csv`) or a manifest expanded for the
/// configured scope. Paths come back absolute; table rows without a scope
/// get the configured one.
pub fn load_cases(config: &BenchmarkConfig) -> Result<Vec<RegistrationCase>> {
    let source = &config.cases_source;
    let is_table = source
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let mut cases = if is_table {
        load_pairing_table(source, config.strict_paths)?
    } else {
        generate_pairs(&load_manifest(source)?.samples, &config.scope)?
    };
    if cases.is_empty() {
        return Err(RunnerError::EmptyCaseList(source.clone()));
    }
    for case in &mut cases {
        if case.scope.is_empty() {
            case.scope = config.scope.clone();
        }
        case.fixed_image = absolute(&case.fixed_image);
        case.moving_image = absolute(&case.moving_image);
        for p in [&mut case.fixed_landmarks, &mut case.moving_landmarks].into_iter().flatten() {
            *p = absolute(p);
        }
    }
    Ok(cases)
}

/// Everything a full benchmark invocation produced.
#[derive(Debug, Clone)]
pub struct BenchmarkOutcome {
    pub experiment: Experiment,
    pub run: RunReport,
    pub summaries: Vec<DatasetSummary>,
}

/// prepare → load → run → evaluate → export.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkOutcome> {
    let experiment = prepare_environment(config)?;
    let cases = load_cases(&experiment.config)?;
    write_pairing_table(&cases, experiment.cases_path())?;
    let run = run_all(&experiment, &cases)?;
    let summaries = evaluate_experiment(&experiment)?;
    Ok(BenchmarkOutcome {
        experiment,
        run,
        summaries,
    })
}

/// Stand-alone evaluation of an experiment directory from its stored table,
/// case list and warped landmarks. Rewrites `summary/`.
pub fn evaluate_experiment(experiment: &Experiment) -> Result<Vec<DatasetSummary>> {
    let table = read_results(&experiment.results_path())?;
    let cases = load_experiment_cases(experiment)?;
    let metrics = evaluate_all(&table, &cases);
    export_summary(experiment, &metrics, &cases)
}

/// The case list stored in an experiment directory.
pub fn load_experiment_cases(experiment: &Experiment) -> Result<Vec<RegistrationCase>> {
    Ok(load_pairing_table(experiment.cases_path(), false)?)
}
