//! Interrupt a benchmark and continue it: the second invocation only runs
//! cases that have no row in the results table yet.
//!
//! ```text
//! cargo run --example resume
//! ```

use std::fs::OpenOptions;
use std::io::Write;

use regbench::adapters::{mock_adapter_spec, MockKind};
use regbench::runner::{read_results, run_benchmark, BenchmarkConfig};
use regbench::synthetic::{generate_dataset, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    regbench::cli::serve_mock_if_invoked();

    let dir = tempfile::tempdir()?;
    let data = generate_dataset(dir.path().join("data"), &SyntheticSpec::uniform(2, 4))?;
    let spec = mock_adapter_spec(&std::env::current_exe()?, &MockKind::Jitter { sigma: 1.0 }, 1, 0);
    let spec_path = dir.path().join("adapter.toml");
    std::fs::write(&spec_path, toml::to_string(&spec)?)?;

    let mut config = BenchmarkConfig::new(&spec_path, &data.manifest_path, dir.path().join("runs"));
    config.experiment_name = Some("demo".into());
    let first = run_benchmark(&config)?;
    let results = first.experiment.results_path();

    // simulate a crash: keep four rows and leave half a line behind
    let text = std::fs::read_to_string(&results)?;
    let kept: Vec<&str> = text.lines().take(5).collect();
    let mut f = OpenOptions::new().write(true).truncate(true).open(&results)?;
    writeln!(f, "{}", kept.join("\n"))?;
    write!(f, "7,completed,0,0.0")?;
    drop(f);
    println!("table cut to {} rows plus a torn line", read_results(&results)?.len());

    config.resume = true;
    let second = run_benchmark(&config)?;
    let mut ran = second.run.executed.clone();
    ran.sort_unstable();
    println!("resumed run executed cases {ran:?}");
    println!("table now holds {} rows", read_results(&results)?.len());
    Ok(())
}
