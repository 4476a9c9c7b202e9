use std::collections::{BTreeSet, VecDeque};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::evaluate::evaluate_case;
use super::experiment::Experiment;
use super::table::{read_results, scan_table, ResultRow, ResultsSink};
use super::{Result, RunnerError};
use crate::adapters::{
    cleanup_workspace, execute_with_timeout, extract_warped_landmarks, preprocess_image,
    render_command, warped_landmarks_path, AdapterError, ExecOptions, PreprocessMode, STDERR_FILE,
};
use crate::dataset::{LandmarkSet, RegistrationCase};
use crate::metrics::{CaseStatus, CaseTiming};
use crate::report::render_case_overlay;

/// What one `run_all` call did.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Ids executed by this call, ascending.
    pub executed: Vec<usize>,
    /// The whole table afterwards, sorted by case id.
    pub table: Vec<ResultRow>,
}

impl RunReport {
    pub fn failure_count(&self) -> usize {
        self.table.iter().filter(|r| r.status.is_failure()).count()
    }
}

fn note(workspace: &Path, msg: &str) {
    let path = workspace.join(STDERR_FILE);
    if let Ok(mut f) = OpenOptions::new().create(true).append(true).open(&path) {
        let _ = writeln!(f, "regbench: {msg}");
    }
}

/// Outcome of the adapter stages of one case, before evaluation.
struct Execution {
    status: CaseStatus,
    exit_code: Option<i32>,
    timing: CaseTiming,
    warped: Option<LandmarkSet>,
    /// The case as the method saw it (preprocessed image paths).
    method_case: RegistrationCase,
}

fn execute_stages(exp: &Experiment, case: &RegistrationCase, ws: &Path) -> Result<Execution> {
    let cfg = &exp.config;
    let spec = &exp.adapter;
    let mut exec = Execution {
        status: CaseStatus::Failed,
        exit_code: None,
        timing: CaseTiming::default(),
        warped: None,
        method_case: case.clone(),
    };
    let per_case = |e: AdapterError| -> Result<()> {
        match e {
            AdapterError::Io { .. } => Err(e.into()),
            other => {
                note(ws, &other.to_string());
                log::warn!("case {}: {other}", case.case_id);
                Ok(())
            }
        }
    };

    if spec.preprocessing != PreprocessMode::None {
        let images = preprocess_image(&case.fixed_image, spec.preprocessing, ws)
            .and_then(|f| Ok((f, preprocess_image(&case.moving_image, spec.preprocessing, ws)?)));
        match images {
            Ok((f, m)) => {
                exec.method_case.fixed_image = f;
                exec.method_case.moving_image = m;
            }
            Err(e) => return per_case(e).map(|_| exec),
        }
    }

    let opts = ExecOptions {
        grace: Duration::from_secs_f64(cfg.grace_s),
        machine_factor: cfg.machine_factor,
        env: spec.environment_overrides.clone(),
    };
    let limit = Duration::from_secs_f64(cfg.timeout_s);
    let method_case = exec.method_case.clone();
    let render = |t| render_command(t, &method_case, ws, spec.method_config.as_deref());

    for template in &spec.prepare_commands {
        let cmd = match render(template) {
            Ok(cmd) => cmd,
            Err(e) => return per_case(e).map(|_| exec),
        };
        let out = execute_with_timeout(&cmd, limit, ws, &opts)?;
        if out.status != CaseStatus::Completed {
            exec.status = out.status;
            exec.exit_code = out.exit_code;
            note(ws, "preparation step did not complete");
            return Ok(exec);
        }
    }

    // execute commands share one time budget
    let started = Instant::now();
    exec.status = CaseStatus::Completed;
    for template in &spec.execute_commands {
        let cmd = match render(template) {
            Ok(cmd) => cmd,
            Err(e) => {
                exec.status = CaseStatus::Failed;
                return per_case(e).map(|_| exec);
            }
        };
        let remaining = limit.saturating_sub(started.elapsed());
        if remaining.is_zero() {
            exec.status = CaseStatus::Timeout;
            break;
        }
        let out = execute_with_timeout(&cmd, remaining, ws, &opts)?;
        exec.timing.wall_time_s += out.wall_time_s;
        exec.timing.normalized_time_s += out.normalized_time_s;
        exec.exit_code = out.exit_code;
        if out.status != CaseStatus::Completed {
            exec.status = out.status;
            break;
        }
    }

    if exec.status == CaseStatus::Completed && case.landmark_paths().is_some() {
        match extract_warped_landmarks(spec, &method_case, ws) {
            Ok(set) => exec.warped = Some(set),
            Err(e @ (AdapterError::MissingOutput(_) | AdapterError::MalformedOutput { .. })) => {
                note(ws, &format!("{e}; the case counts as failed"));
                log::warn!("case {}: {e}", case.case_id);
                exec.status = CaseStatus::Failed;
            }
            Err(e) => {
                exec.status = CaseStatus::Failed;
                return per_case(e).map(|_| exec);
            }
        }
    }
    Ok(exec)
}

/// Runs the adapter pipeline for one case and evaluates it. Problems with
/// the case itself end up in the returned row; only workspace I/O errors
/// are returned as errors.
pub fn run_case(exp: &Experiment, case: &RegistrationCase) -> Result<ResultRow> {
    let ws = exp.workspace(case.case_id);
    if ws.exists() {
        fs::remove_dir_all(&ws).map_err(|e| RunnerError::io(&ws, e))?;
    }
    fs::create_dir_all(&ws).map_err(|e| RunnerError::io(&ws, e))?;

    let exec = if !case.fixed_image.is_file() || !case.moving_image.is_file() {
        note(&ws, "input image missing, case skipped");
        log::warn!("case {}: input image missing, skipped", case.case_id);
        Execution {
            status: CaseStatus::Skipped,
            exit_code: None,
            timing: CaseTiming::default(),
            warped: None,
            method_case: case.clone(),
        }
    } else {
        execute_stages(exp, case, &ws)?
    };

    if let Err(e) = cleanup_workspace(&exp.adapter, &exec.method_case, &ws, exp.config.keep_debug) {
        log::warn!("case {}: cleanup failed: {e}", case.case_id);
    }

    let warped_path = match exec.status {
        CaseStatus::Completed if exec.warped.is_some() => warped_landmarks_path(&exp.adapter, &exec.method_case, &ws).ok(),
        _ => None,
    };
    let evaluated = match evaluate_case(case, exec.status, exec.warped, exec.timing) {
        Ok(ev) => ev,
        Err(e) => {
            note(&ws, &format!("evaluation failed: {e}"));
            log::warn!("case {}: evaluation failed: {e}", case.case_id);
            None
        }
    };
    if exp.config.visual_reports {
        if let Some(ev) = &evaluated {
            match render_case_overlay(case, &ev.fixed, &ev.moving, &ev.warped, &ev.geometry) {
                Ok(svg) => {
                    let p = ws.join("overlay.svg");
                    fs::write(&p, svg).map_err(|e| RunnerError::io(&p, e))?;
                }
                Err(e) => log::warn!("case {}: no overlay: {e}", case.case_id),
            }
        }
    }
    log::info!(
        "case {}: {} in {:.2} s",
        case.case_id,
        exec.status,
        exec.timing.wall_time_s
    );
    Ok(ResultRow {
        case_id: case.case_id,
        status: exec.status,
        exit_code: exec.exit_code,
        wall_time_s: exec.timing.wall_time_s,
        normalized_time_s: exec.timing.normalized_time_s,
        metrics: evaluated.map(|ev| ev.metrics),
        fixed_image: case.fixed_image.clone(),
        moving_image: case.moving_image.clone(),
        fixed_landmarks: case.fixed_landmarks.clone(),
        moving_landmarks: case.moving_landmarks.clone(),
        warped_landmarks: warped_path,
    })
}

/// Executes every case without a terminal row, `workers` at a time, taking
/// cases from one queue in case order. Each finished case is appended to
/// the results table as one row.
pub fn run_all(exp: &Experiment, cases: &[RegistrationCase]) -> Result<RunReport> {
    let results = exp.results_path();
    let done: BTreeSet<usize> = scan_table(&results)?.rows.iter().map(|r| r.case_id).collect();
    let pending: VecDeque<&RegistrationCase> =
        cases.iter().filter(|c| !done.contains(&c.case_id)).collect();
    log::info!(
        "{} cases, {} already done, {} to run with {} worker(s)",
        cases.len(),
        cases.len() - pending.len(),
        pending.len(),
        exp.config.workers
    );

    let sink = ResultsSink::open(&results)?;
    let workers = exp.config.workers.max(1).min(pending.len().max(1));
    let queue = Mutex::new(pending);
    let executed = Mutex::new(Vec::new());
    let failure: Mutex<Option<RunnerError>> = Mutex::new(None);
    let abort = AtomicBool::new(false);

    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                if abort.load(Ordering::SeqCst) {
                    break;
                }
                let Some(case) = queue.lock().unwrap_or_else(|e| e.into_inner()).pop_front() else {
                    break;
                };
                let outcome = run_case(exp, case).and_then(|row| sink.append(&row));
                match outcome {
                    Ok(()) => executed.lock().unwrap_or_else(|e| e.into_inner()).push(case.case_id),
                    Err(e) => {
                        log::error!("case {}: {e}", case.case_id);
                        abort.store(true, Ordering::SeqCst);
                        failure.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert(e);
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = failure.into_inner().unwrap_or_else(|e| e.into_inner()) {
        return Err(e);
    }
    let mut executed = executed.into_inner().unwrap_or_else(|e| e.into_inner());
    executed.sort_unstable();
    let mut table = read_results(&results)?;
    table.sort_by_key(|r| r.case_id);
    Ok(RunReport { executed, table })
}
