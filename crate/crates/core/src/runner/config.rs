use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Result, RunnerError};
use crate::adapters::{DEFAULT_GRACE_S, DEFAULT_TIMEOUT_S};

fn default_scope() -> String {
    "full".into()
}
fn default_workers() -> usize {
    1
}
fn default_timeout() -> f64 {
    DEFAULT_TIMEOUT_S
}
fn default_grace() -> f64 {
    DEFAULT_GRACE_S
}
fn default_factor() -> f64 {
    1.0
}

/// Everything one benchmark run needs. Also the on-disk form of
/// `config-copy/config.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub adapter_spec: PathBuf,
    /// A pairing table (`.csv`) or a dataset manifest (anything else).
    pub cases_source: PathBuf,
    #[serde(default = "default_scope")]
    pub scope: String,
    pub experiment_root: PathBuf,
    /// Fixed experiment directory name instead of `<method>_<timestamp>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment_name: Option<String>,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    /// Delay between SIGTERM and SIGKILL for a case over its limit.
    #[serde(default = "default_grace")]
    pub grace_s: f64,
    #[serde(default = "default_factor")]
    pub machine_factor: f64,
    #[serde(default)]
    pub visual_reports: bool,
    #[serde(default)]
    pub resume: bool,
    #[serde(default)]
    pub keep_debug: bool,
    /// Require every file named in a pairing table to exist up front.
    #[serde(default)]
    pub strict_paths: bool,
}

impl BenchmarkConfig {
    pub fn new(
        adapter_spec: impl Into<PathBuf>,
        cases_source: impl Into<PathBuf>,
        experiment_root: impl Into<PathBuf>,
    ) -> Self {
        BenchmarkConfig {
            adapter_spec: adapter_spec.into(),
            cases_source: cases_source.into(),
            scope: default_scope(),
            experiment_root: experiment_root.into(),
            experiment_name: None,
            workers: default_workers(),
            timeout_s: default_timeout(),
            grace_s: default_grace(),
            machine_factor: default_factor(),
            visual_reports: false,
            resume: false,
            keep_debug: false,
            strict_paths: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(RunnerError::InvalidConfig(msg));
        if self.workers < 1 {
            return bad("workers must be at least 1".into());
        }
        if !(self.timeout_s > 0.0 && self.timeout_s.is_finite()) {
            return bad(format!("timeout_s must be positive, got {}", self.timeout_s));
        }
        if !(self.grace_s >= 0.0 && self.grace_s.is_finite()) {
            return bad(format!("grace_s must be non-negative, got {}", self.grace_s));
        }
        if !(self.machine_factor > 0.0 && self.machine_factor.is_finite()) {
            return bad(format!("machine_factor must be positive, got {}", self.machine_factor));
        }
        if self.scope.trim().is_empty() {
            return bad("scope is empty".into());
        }
        if let Some(name) = &self.experiment_name {
            if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
                return bad(format!("invalid experiment name {name:?}"));
            }
        }
        Ok(())
    }

    /// Copy with every path made absolute against the working directory.
    pub fn resolved(&self) -> Self {
        let abs = |p: &Path| std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
        BenchmarkConfig {
            adapter_spec: abs(&self.adapter_spec),
            cases_source: abs(&self.cases_source),
            experiment_root: abs(&self.experiment_root),
            ..self.clone()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Reads a TOML config; relative paths are taken from the file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<BenchmarkConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| RunnerError::io(path, e))?;
    let mut cfg: BenchmarkConfig = toml::from_str(&text)
        .map_err(|e| RunnerError::InvalidConfig(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [&mut cfg.adapter_spec, &mut cfg.cases_source, &mut cfg.experiment_root] {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(cfg)
}
