mod common;

use std::fs;

use common::*;
use regbench::adapters::MockKind;
use regbench::dataset::{generate_pairs, load_manifest, write_pairing_table};
use regbench::metrics::CaseStatus;
use regbench::runner::{
    evaluate_all, export_summary, load_experiment_cases, read_results, run_all, run_benchmark,
    BenchmarkConfig, Experiment, RunnerError,
};
use regbench::synthetic::SyntheticSpec;

fn config(tmp: &std::path::Path, kind: MockKind, source: &std::path::Path) -> BenchmarkConfig {
    let adapter = mock_spec(tmp, &kind, 8, 0);
    let mut cfg = BenchmarkConfig::new(adapter, source, tmp.join("runs"));
    cfg.workers = 3;
    cfg
}

#[test]
fn library_run_matches_reevaluation() {
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(2, 4));
    let outcome = run_benchmark(&config(tmp.path(), MockKind::Jitter { sigma: 1.0 }, &data.manifest_path)).unwrap();
    assert_eq!(outcome.run.executed.len(), 12);
    assert_eq!(outcome.run.failure_count(), 0);
    assert!(outcome.experiment.dir.file_name().unwrap().to_str().unwrap().starts_with("mock-jitter_"));

    let table = read_results(&outcome.experiment.results_path()).unwrap();
    let cases = load_experiment_cases(&outcome.experiment).unwrap();
    let again = evaluate_all(&table, &cases);
    let inline: Vec<_> = {
        let mut t = table.clone();
        t.sort_by_key(|r| r.case_id);
        t.into_iter().map(|r| r.metrics.unwrap()).collect()
    };
    assert_eq!(again.len(), inline.len());
    for (a, b) in again.iter().zip(&inline) {
        assert_eq!(a.case_id, b.case_id);
        assert!((a.final_median_rtre - b.final_median_rtre).abs() < 1e-12);
        assert!((a.robustness - b.robustness).abs() < 1e-12);
    }
}

#[test]
fn run_all_skips_finished_cases() {
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(1, 4));
    let outcome = run_benchmark(&config(tmp.path(), MockKind::Identity, &data.manifest_path)).unwrap();
    let exp = Experiment::open(&outcome.experiment.dir).unwrap();
    let cases = load_experiment_cases(&exp).unwrap();
    let report = run_all(&exp, &cases).unwrap();
    assert!(report.executed.is_empty());
    assert_eq!(report.table.len(), 6);
}

#[test]
fn pairing_table_input_and_missing_images() {
    let tmp = tempfile::tempdir().unwrap();
    // explicit sizes keep skipped cases measurable without their images
    let spec = SyntheticSpec {
        write_sizes: true,
        ..SyntheticSpec::uniform(1, 3)
    };
    let data = dataset(tmp.path(), &spec);
    let cases = generate_pairs(&load_manifest(&data.manifest_path).unwrap().samples, "full").unwrap();
    let table = tmp.path().join("pairs.csv");
    write_pairing_table(&cases, &table).unwrap();
    fs::remove_file(&cases[0].moving_image).unwrap();

    let outcome = run_benchmark(&config(tmp.path(), MockKind::Oracle, &table)).unwrap();
    let rows = rows(&outcome.experiment.dir);
    let skipped: Vec<_> = rows.iter().filter(|r| r.status == CaseStatus::Skipped).collect();
    // one missing moving image touches the two pairs that use it
    assert_eq!(skipped.len(), 2);
    assert!(skipped.iter().all(|r| r.exit_code.is_none()));
    let s = &outcome.summaries[0];
    assert_eq!(s.case_count, 3);
    assert_eq!(s.failure_count, 2);
}

#[test]
fn empty_metrics_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(1, 2));
    let outcome = run_benchmark(&config(tmp.path(), MockKind::Identity, &data.manifest_path)).unwrap();
    let cases = load_experiment_cases(&outcome.experiment).unwrap();
    assert!(matches!(
        export_summary(&outcome.experiment, &[], &cases),
        Err(RunnerError::EmptyGroup)
    ));
}

#[test]
fn existing_directory_needs_resume() {
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(1, 2));
    let mut cfg = config(tmp.path(), MockKind::Identity, &data.manifest_path);
    cfg.experiment_name = Some("fixed".into());
    run_benchmark(&cfg).unwrap();
    assert!(matches!(run_benchmark(&cfg), Err(RunnerError::ExistsWithoutResume(_))));
    cfg.resume = true;
    let again = run_benchmark(&cfg).unwrap();
    assert!(again.run.executed.is_empty());
}
