use std::fs;
use std::path::{Path, PathBuf};

use super::table::{create_table, repair_table, RESULTS_FILE};
use super::{BenchmarkConfig, Result, RunnerError};
use crate::adapters::{load_adapter_spec, AdapterSpec};

pub const CONFIG_DIR: &str = "config-copy";
pub const CONFIG_FILE: &str = "config.toml";
pub const ADAPTER_FILE: &str = "adapter.toml";
pub const CASES_DIR: &str = "cases";
pub const SUMMARY_DIR: &str = "summary";
pub const CASES_FILE: &str = "cases.csv";

const TIMESTAMP: &str = "%Y%m%d-%H%M%S";

/// A prepared experiment directory:
///
/// ```text
/// <root>/<method>_<timestamp>/
///     config-copy/{config.toml, adapter.toml}
///     cases.csv
///     results.csv
///     cases/<case_id>/
///     summary/
/// ```
#[derive(Debug, Clone)]
pub struct Experiment {
    pub dir: PathBuf,
    pub config: BenchmarkConfig,
    pub adapter: AdapterSpec,
}

impl Experiment {
    pub fn results_path(&self) -> PathBuf {
        self.dir.join(RESULTS_FILE)
    }

    pub fn cases_path(&self) -> PathBuf {
        self.dir.join(CASES_FILE)
    }

    pub fn summary_dir(&self) -> PathBuf {
        self.dir.join(SUMMARY_DIR)
    }

    pub fn workspace(&self, case_id: usize) -> PathBuf {
        self.dir.join(CASES_DIR).join(case_id.to_string())
    }

    /// Re-opens a finished or interrupted experiment from its config copy.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = std::path::absolute(dir.as_ref()).map_err(|e| RunnerError::io(dir.as_ref(), e))?;
        let cfg_path = dir.join(CONFIG_DIR).join(CONFIG_FILE);
        let text = fs::read_to_string(&cfg_path).map_err(|e| RunnerError::io(&cfg_path, e))?;
        let config: BenchmarkConfig = toml::from_str(&text)
            .map_err(|e| RunnerError::InvalidConfig(format!("{}: {e}", cfg_path.display())))?;
        let adapter = load_adapter_spec(dir.join(CONFIG_DIR).join(ADAPTER_FILE))?;
        Ok(Experiment { dir, config, adapter })
    }
}

fn latest_for_method(root: &Path, method: &str) -> Option<PathBuf> {
    let prefix = format!("{method}_");
    let mut candidates: Vec<PathBuf> = fs::read_dir(root)
        .ok()?
        .flatten()
        .filter(|e| e.file_name().to_string_lossy().starts_with(&prefix))
        .map(|e| e.path())
        .filter(|p| p.join(CONFIG_DIR).is_dir())
        .collect();
    // timestamps sort lexicographically
    candidates.sort();
    candidates.pop()
}

/// Creates (or, with `resume`, reopens) the experiment directory.
///
/// A fresh directory gets a copy of the resolved config, the adapter spec
/// as written, an empty results table and the `cases/` and `summary/`
/// folders. A resumed one keeps its copies and table, minus any partial
/// final row.
pub fn prepare_environment(config: &BenchmarkConfig) -> Result<Experiment> {
    config.validate()?;
    let config = config.resolved();
    let adapter = load_adapter_spec(&config.adapter_spec)?;
    let root = &config.experiment_root;
    fs::create_dir_all(root).map_err(|source| RunnerError::RootNotWritable {
        path: root.clone(),
        source,
    })?;

    let dir = match (&config.experiment_name, config.resume) {
        (Some(name), _) => root.join(name),
        (None, true) => latest_for_method(root, &adapter.method_name).unwrap_or_else(|| {
            root.join(format!("{}_{}", adapter.method_name, chrono::Local::now().format(TIMESTAMP)))
        }),
        (None, false) => {
            root.join(format!("{}_{}", adapter.method_name, chrono::Local::now().format(TIMESTAMP)))
        }
    };

    let exists = dir.join(CONFIG_DIR).is_dir();
    if exists && !config.resume {
        return Err(RunnerError::ExistsWithoutResume(dir));
    }
    if exists {
        log::info!("resuming experiment in {}", dir.display());
        let results = dir.join(RESULTS_FILE);
        if results.exists() {
            repair_table(&results)?;
        } else {
            create_table(&results)?;
        }
    } else {
        fs::create_dir(&dir).or_else(|e| match e.kind() {
            std::io::ErrorKind::AlreadyExists if dir.is_dir() => Ok(()),
            _ => Err(RunnerError::RootNotWritable { path: dir.clone(), source: e }),
        })?;
        let copies = dir.join(CONFIG_DIR);
        fs::create_dir_all(&copies).map_err(|e| RunnerError::io(&copies, e))?;
        let cfg_copy = copies.join(CONFIG_FILE);
        fs::write(&cfg_copy, config.to_toml()).map_err(|e| RunnerError::io(&cfg_copy, e))?;
        let spec_copy = copies.join(ADAPTER_FILE);
        fs::copy(&config.adapter_spec, &spec_copy).map_err(|e| RunnerError::io(&spec_copy, e))?;
        if let Some(method_cfg) = adapter.method_config.as_ref().filter(|p| p.is_file()) {
            if let Some(name) = method_cfg.file_name() {
                let target = copies.join(name);
                if target != spec_copy && target != cfg_copy {
                    fs::copy(method_cfg, &target).map_err(|e| RunnerError::io(&target, e))?;
                }
            }
        }
        create_table(&dir.join(RESULTS_FILE))?;
    }
    for sub in [CASES_DIR, SUMMARY_DIR] {
        let p = dir.join(sub);
        fs::create_dir_all(&p).map_err(|e| RunnerError::io(&p, e))?;
    }
    Ok(Experiment { dir, config, adapter })
}
