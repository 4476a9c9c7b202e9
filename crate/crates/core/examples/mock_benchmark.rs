//! A complete benchmark over a synthetic dataset, with this example's own
//! executable acting as the registration method.
//!
//! ```text
//! cargo run --example mock_benchmark -- [identity|oracle|jitter|crash]
//! ```

use regbench::adapters::{mock_adapter_spec, MockKind};
use regbench::runner::{run_benchmark, BenchmarkConfig};
use regbench::synthetic::{generate_dataset, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    regbench::cli::serve_mock_if_invoked();

    let kind = match std::env::args().nth(1).as_deref().unwrap_or("jitter") {
        "identity" => MockKind::Identity,
        "oracle" => MockKind::Oracle,
        "crash" => MockKind::Crash { code: 1 },
        _ => MockKind::Jitter { sigma: 1.2 },
    };
    let dir = tempfile::tempdir()?;
    let data = generate_dataset(dir.path().join("data"), &SyntheticSpec::uniform(3, 4))?;

    let spec = mock_adapter_spec(&std::env::current_exe()?, &kind, 42, 0);
    let spec_path = dir.path().join("adapter.toml");
    std::fs::write(&spec_path, toml::to_string(&spec)?)?;

    let mut config = BenchmarkConfig::new(&spec_path, &data.manifest_path, dir.path().join("runs"));
    config.workers = 4;
    config.visual_reports = true;
    let outcome = run_benchmark(&config)?;

    println!("experiment {}", outcome.experiment.dir.display());
    println!("{} cases run, {} not completed", outcome.run.executed.len(), outcome.run.failure_count());
    for s in &outcome.summaries {
        println!(
            "{} [{}]: AMrTRE {:.3}%  MMrTRE {:.3}%  robustness {:.1}%",
            s.method,
            s.scope,
            s.avg_median_rtre * 100.0,
            s.median_median_rtre * 100.0,
            s.avg_robustness * 100.0
        );
    }
    let table = std::fs::read_to_string(outcome.experiment.summary_dir().join("table.md"))?;
    println!("\n{table}");
    Ok(())
}
