use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, ExitStatus, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{AdapterError, Result, DEFAULT_GRACE_S};
use crate::metrics::CaseStatus;

pub const STDOUT_FILE: &str = "stdout.txt";
pub const STDERR_FILE: &str = "stderr.txt";

const POLL: Duration = Duration::from_millis(10);

#[derive(Debug, Clone)]
pub struct ExecOptions {
    /// Time between SIGTERM and SIGKILL once the limit is hit.
    pub grace: Duration,
    pub machine_factor: f64,
    pub env: BTreeMap<String, String>,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            grace: Duration::from_secs_f64(DEFAULT_GRACE_S),
            machine_factor: 1.0,
            env: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionOutcome {
    /// `Completed`, `Failed` or `Timeout`.
    pub status: CaseStatus,
    pub exit_code: Option<i32>,
    pub wall_time_s: f64,
    pub normalized_time_s: f64,
    pub stdout_path: PathBuf,
    pub stderr_path: PathBuf,
}

fn append(path: &Path) -> Result<File> {
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| AdapterError::io(path, e))
}

fn signal_group(child: &Child, signal: libc::c_int) {
    // the child leads its own process group, so -pid reaches every descendant
    let pgid = child.id() as libc::pid_t;
    unsafe {
        libc::kill(-pgid, signal);
    }
}

fn wait_until(child: &mut Child, deadline: Instant) -> std::io::Result<Option<ExitStatus>> {
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(Some(status));
        }
        let now = Instant::now();
        if now >= deadline {
            return Ok(None);
        }
        thread::sleep(POLL.min(deadline - now));
    }
}

/// Runs `cmd` in `workspace` with a hard wall-clock limit.
///
/// The child runs in a fresh process group. When the limit passes, the group
/// gets SIGTERM and, after `grace`, SIGKILL. Output is appended to
/// `stdout.txt`/`stderr.txt` in the workspace. A program that cannot be
/// spawned yields a `Failed` outcome with the reason in `stderr.txt`; only
/// workspace I/O problems are returned as errors.
pub fn execute_with_timeout(
    cmd: &[String],
    limit: Duration,
    workspace: &Path,
    opts: &ExecOptions,
) -> Result<ExecutionOutcome> {
    let stdout_path = workspace.join(STDOUT_FILE);
    let stderr_path = workspace.join(STDERR_FILE);
    let stdout = append(&stdout_path)?;
    let mut stderr = append(&stderr_path)?;
    let mut outcome = ExecutionOutcome {
        status: CaseStatus::Failed,
        exit_code: None,
        wall_time_s: 0.0,
        normalized_time_s: 0.0,
        stdout_path,
        stderr_path: stderr_path.clone(),
    };

    let Some((program, args)) = cmd.split_first() else {
        writeln!(stderr, "regbench: empty command").map_err(|e| AdapterError::io(&stderr_path, e))?;
        return Ok(outcome);
    };
    let err_handle = stderr
        .try_clone()
        .map_err(|e| AdapterError::io(&stderr_path, e))?;

    let started = Instant::now();
    let spawned = Command::new(program)
        .args(args)
        .current_dir(workspace)
        .envs(&opts.env)
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(err_handle)
        .process_group(0)
        .spawn();
    let mut child = match spawned {
        Ok(child) => child,
        Err(e) => {
            writeln!(stderr, "regbench: failed to spawn {program:?}: {e}")
                .map_err(|e| AdapterError::io(&stderr_path, e))?;
            log::warn!("failed to spawn {program:?}: {e}");
            return Ok(outcome);
        }
    };

    let io_err = |e| AdapterError::io(workspace, e);
    let status = match wait_until(&mut child, started + limit).map_err(io_err)? {
        Some(status) => Some(status),
        None => {
            signal_group(&child, libc::SIGTERM);
            let status = wait_until(&mut child, Instant::now() + opts.grace).map_err(io_err)?;
            // also clears helpers that ignored SIGTERM or outlived the leader
            signal_group(&child, libc::SIGKILL);
            if status.is_none() {
                child.wait().map_err(io_err)?;
            }
            None
        }
    };
    outcome.wall_time_s = started.elapsed().as_secs_f64();
    outcome.normalized_time_s = outcome.wall_time_s * opts.machine_factor;

    match status {
        None => {
            outcome.status = CaseStatus::Timeout;
            let _ = writeln!(
                stderr,
                "regbench: terminated after exceeding the {:.3} s limit",
                limit.as_secs_f64()
            );
        }
        Some(status) => {
            outcome.exit_code = status.code();
            if status.success() {
                outcome.status = CaseStatus::Completed;
            } else if let Some(sig) = status.signal() {
                let _ = writeln!(stderr, "regbench: killed by signal {sig}");
            }
        }
    }
    Ok(outcome)
}
