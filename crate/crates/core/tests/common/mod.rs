#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use regbench::adapters::{mock_adapter_spec, MockKind};
use regbench::runner::{read_results, ResultRow};
use regbench::synthetic::{generate_dataset, SyntheticDataset, SyntheticSpec};

pub const BIN: &str = env!("CARGO_BIN_EXE_regbench");

pub fn bin() -> Command {
    let mut cmd = Command::new(BIN);
    cmd.env("RUST_LOG", "warn").env_remove("REGBENCH_WORKERS");
    cmd
}

pub fn run_bin(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn regbench")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn dataset(dir: &Path, spec: &SyntheticSpec) -> SyntheticDataset {
    generate_dataset(dir.join("data"), spec).expect("synthetic dataset")
}

/// Writes a mock adapter spec backed by the regbench binary.
pub fn mock_spec(dir: &Path, kind: &MockKind, seed: u64, delay_ms: u64) -> PathBuf {
    let spec = mock_adapter_spec(Path::new(BIN), kind, seed, delay_ms);
    let path = dir.join(format!("{}-{seed}-{delay_ms}.toml", spec.method_name));
    fs::write(&path, toml::to_string(&spec).unwrap()).unwrap();
    path
}

/// `regbench run` with a fixed experiment name; returns the process output
/// and the experiment directory.
pub fn run_mock(
    dir: &Path,
    manifest: &Path,
    adapter: &Path,
    name: &str,
    extra: &[&str],
) -> (Output, PathBuf) {
    let root = dir.join("runs");
    let mut args = vec![
        "run",
        "--adapter",
        adapter.to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        root.to_str().unwrap(),
        "--name",
        name,
    ];
    args.extend_from_slice(extra);
    (run_bin(&args), root.join(name))
}

pub fn rows(experiment: &Path) -> Vec<ResultRow> {
    let mut rows = read_results(&experiment.join("results.csv")).unwrap();
    rows.sort_by_key(|r| r.case_id);
    rows
}

pub fn metric_columns(experiment: &Path) -> Vec<Vec<String>> {
    rows(experiment).iter().map(|r| r.metric_columns()).collect()
}

pub fn svg(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
