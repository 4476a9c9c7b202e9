//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single `PASS`/`FAIL` line with the measured values.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use regbench::adapters::MockKind;
use regbench::dataset::LandmarkSet;
use regbench::metrics::{
    case_statistics, euclidean_tre, relative_tre, robustness, CaseStatus,
    CaseTiming, DatasetSummary,
};
use regbench::report::{radar_scaled, radar_value, render_summary_table, RadarAxis};
use regbench::runner::{read_summary, ResultRow};
use regbench::synthetic::SyntheticSpec;
use regbench::stats;

fn verdict(n: u32, ok: bool, detail: impl std::fmt::Display) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn summary_of(exp: &Path) -> DatasetSummary {
    let mut s = read_summary(&exp.join("summary/summary.toml")).unwrap();
    assert_eq!(s.len(), 1);
    s.remove(0)
}

#[test]
fn c1_nine_sample_layout_yields_108_pairs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::nine_sample_layout());
    let out = tmp.path().join("pairs.csv");
    let started = Instant::now();
    let res = run_bin(&["pair", "--manifest", data.manifest_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let elapsed = started.elapsed();
    assert_eq!(code(&res), 0, "{}", stderr(&res));

    let mut reader = csv::Reader::from_path(&out).unwrap();
    let sample_col = reader.headers().unwrap().iter().position(|h| h == "Sample").unwrap();
    let mut per_sample: BTreeMap<String, usize> = BTreeMap::new();
    for rec in reader.records() {
        *per_sample.entry(rec.unwrap()[sample_col].to_string()).or_default() += 1;
    }
    let total: usize = per_sample.values().sum();
    let mut counts: Vec<usize> = per_sample.values().copied().collect();
    counts.sort_unstable();
    let ok = total == 108
        && counts == [10, 10, 10, 10, 10, 10, 10, 10, 28]
        && elapsed < Duration::from_secs(1);
    verdict(1, ok, format!("{total} pairs, per sample {counts:?}, {elapsed:?}"));
}

/// Brute-force recomputation written without the library's helpers.
fn oracle(fixed: &[(f64, f64)], moving: &[(f64, f64)], warped: &[(f64, f64)], diag: f64) -> [f64; 5] {
    fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
        let dx = a.0 - b.0;
        let dy = a.1 - b.1;
        (dx * dx + dy * dy).sqrt()
    }
    fn median(mut v: Vec<f64>) -> f64 {
        // insertion sort
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                j -= 1;
            }
        }
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        }
    }
    let n = fixed.len();
    let mut fin = Vec::new();
    let mut improved = 0;
    for i in 0..n {
        let a = dist(fixed[i], moving[i]);
        let b = dist(fixed[i], warped[i]);
        fin.push(b / diag);
        if b < a {
            improved += 1;
        }
    }
    let mut max = fin[0];
    for v in &fin {
        if *v > max {
            max = *v;
        }
    }
    [median(fin.clone()), max, improved as f64 / n as f64, fin[0], fin[n - 1]]
}

#[test]
fn c2_metrics_match_brute_force_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let n = rng.random_range(1..=100);
        let w: f64 = rng.random_range(10.0..50_000.0);
        let h: f64 = rng.random_range(10.0..50_000.0);
        let diag = (w * w + h * h).sqrt();
        let pt = |rng: &mut ChaCha8Rng| (rng.random_range(0.0..w), rng.random_range(0.0..h));
        let fixed: Vec<_> = (0..n).map(|_| pt(&mut rng)).collect();
        let moving: Vec<_> = (0..n).map(|_| pt(&mut rng)).collect();
        // some warped points equal the moving ones to exercise ties
        let warped: Vec<_> = (0..n)
            .map(|i| if rng.random_bool(0.1) { moving[i] } else { pt(&mut rng) })
            .collect();
        let (f, m, wp) = (LandmarkSet::from_xy(&fixed), LandmarkSet::from_xy(&moving), LandmarkSet::from_xy(&warped));

        let rtre = relative_tre(&euclidean_tre(&f, &wp).unwrap(), diag).unwrap();
        let stats = case_statistics(case, CaseStatus::Completed, &f, &m, &wp, diag, CaseTiming::default()).unwrap();
        let expect = oracle(&fixed, &moving, &warped, diag);
        let got = [
            stats.final_median_rtre,
            stats.final_max_rtre,
            robustness(&f, &m, &wp).unwrap(),
            rtre[0],
            rtre[n - 1],
        ];
        for (g, e) in got.iter().zip(expect) {
            worst = worst.max((g - e).abs());
        }
        assert_eq!(stats.robustness, got[2]);
    }
    let elapsed = started.elapsed();
    verdict(
        2,
        worst < 1e-9 && elapsed < Duration::from_secs(10),
        format!("max abs diff {worst:e} over 1000 cases, {elapsed:?}"),
    );
}

#[test]
fn c3_oracle_and_identity_mocks_end_to_end() {
    let started = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(3, 4));

    let oracle = mock_spec(tmp.path(), &MockKind::Oracle, 0, 0);
    let (res, exp) = run_mock(tmp.path(), &data.manifest_path, &oracle, "oracle", &["--workers", "4"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let s = summary_of(&exp);
    let oracle_ok = s.avg_median_rtre.abs() <= 1e-12 && s.avg_robustness == 1.0 && s.case_count == 18;

    let identity = mock_spec(tmp.path(), &MockKind::Identity, 0, 0);
    let (res, exp) = run_mock(tmp.path(), &data.manifest_path, &identity, "identity", &["--workers", "4"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let table = rows(&exp);
    let identity_ok = table.len() == 18
        && table.iter().all(|r| {
            let m = r.metrics.as_ref().unwrap();
            m.final_median_rtre == m.initial_median_rtre
                && m.final_max_rtre == m.initial_max_rtre
                && m.robustness == 0.0
        });
    let elapsed = started.elapsed();
    verdict(
        3,
        oracle_ok && identity_ok && elapsed < Duration::from_secs(30),
        format!(
            "oracle AMrTRE {:e}, robustness {}; identity final == initial: {identity_ok}; {elapsed:?}",
            s.avg_median_rtre, s.avg_robustness
        ),
    );
}

#[test]
fn c4_crashing_method_keeps_initial_position() {
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(2, 4));
    let crash = mock_spec(tmp.path(), &MockKind::Crash { code: 3 }, 0, 0);
    let (res, exp) = run_mock(tmp.path(), &data.manifest_path, &crash, "crash", &["--workers", "4"]);
    let table = rows(&exp);
    let initial: Vec<f64> = table.iter().map(|r| r.metrics.as_ref().unwrap().initial_median_rtre).collect();
    let initial_mean = stats::mean(&initial).unwrap();
    let s = summary_of(&exp);
    let ok = code(&res) == 2
        && table.iter().all(|r| r.status == CaseStatus::Failed && r.exit_code == Some(3))
        && s.avg_median_rtre == initial_mean
        && s.avg_robustness == 0.0
        && s.failure_count == s.case_count;
    verdict(
        4,
        ok,
        format!("AMrTRE {} vs initial mean {initial_mean}, robustness {}", s.avg_median_rtre, s.avg_robustness),
    );
}

#[test]
fn c5_hanging_method_times_out() {
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(1, 3));
    let hang = mock_spec(tmp.path(), &MockKind::Hang, 0, 0);
    let (res, exp) = run_mock(
        tmp.path(),
        &data.manifest_path,
        &hang,
        "hang",
        &["--timeout", "2", "--workers", "3"],
    );
    let table = rows(&exp);
    let limit = 2.0 + 5.0;
    let walls: Vec<f64> = table.iter().map(|r| r.wall_time_s).collect();
    let ok = code(&res) == 2
        && table.len() == 3
        && table.iter().all(|r| {
            let m = r.metrics.as_ref().unwrap();
            r.status == CaseStatus::Timeout
                && r.wall_time_s >= 2.0
                && r.wall_time_s <= limit
                && m.final_median_rtre == m.initial_median_rtre
                && m.robustness == 0.0
        });
    verdict(5, ok, format!("per-case wall times {walls:?} s, limit {limit} s"));
}

fn data_rows(results: &Path) -> usize {
    fs::read_to_string(results)
        .map(|s| s.lines().count().saturating_sub(1))
        .unwrap_or(0)
}

#[test]
fn c6_resume_runs_only_pending_cases() {
    let started = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(2, 5));
    let spec = mock_spec(tmp.path(), &MockKind::Jitter { sigma: 1.5 }, 11, 150);
    let root = tmp.path().join("runs");
    let exp = root.join("interrupted");
    let args = |name: &str| {
        vec![
            "run".to_string(),
            "--adapter".into(),
            spec.display().to_string(),
            "--manifest".into(),
            data.manifest_path.display().to_string(),
            "--out".into(),
            root.display().to_string(),
            "--name".into(),
            name.into(),
        ]
    };

    let mut child = bin().args(args("interrupted")).spawn().unwrap();
    let results = exp.join("results.csv");
    while data_rows(&results) < 5 {
        assert!(started.elapsed() < Duration::from_secs(30), "run made no progress");
        std::thread::sleep(Duration::from_millis(20));
    }
    child.kill().unwrap();
    child.wait().unwrap();
    // let an orphaned mock from the killed run finish
    std::thread::sleep(Duration::from_millis(400));

    let before = rows(&exp);
    let done_before = before.len();
    let mut resume_args = args("interrupted");
    resume_args.push("--resume".into());
    let res = bin().args(&resume_args).output().unwrap();
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let after = rows(&exp);
    let ran_now = stdout(&res)
        .lines()
        .find_map(|l| l.split_once(" run now").map(|(h, _)| h.rsplit('(').next().unwrap().parse::<usize>().unwrap()))
        .unwrap();

    let res = bin().args(args("uninterrupted")).output().unwrap();
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let same_metrics = metric_columns(&exp) == metric_columns(&root.join("uninterrupted"));
    let kept: Vec<&ResultRow> = after.iter().filter(|r| before.iter().any(|b| b.case_id == r.case_id)).collect();
    let kept_intact = kept.len() == done_before && kept.iter().zip(&before).all(|(a, b)| *a == b);
    let elapsed = started.elapsed();
    let ok = (5..20).contains(&done_before)
        && ran_now == 20 - done_before
        && after.len() == 20
        && kept_intact
        && same_metrics
        && elapsed < Duration::from_secs(60);
    verdict(
        6,
        ok,
        format!("{done_before} done before interrupt, {ran_now} run on resume, metrics equal: {same_metrics}, {elapsed:?}"),
    );
}

#[test]
fn c7_worker_count_does_not_change_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(3, 4));
    let spec = mock_spec(tmp.path(), &MockKind::Jitter { sigma: 2.0 }, 5, 0);
    let (r1, e1) = run_mock(tmp.path(), &data.manifest_path, &spec, "w1", &["--workers", "1"]);
    let (r4, e4) = run_mock(tmp.path(), &data.manifest_path, &spec, "w4", &["--workers", "4"]);
    assert_eq!((code(&r1), code(&r4)), (0, 0));
    let (a, b) = (metric_columns(&e1), metric_columns(&e4));
    verdict(7, a == b && a.len() == 18, format!("{} rows each, identical: {}", a.len(), a == b));
}

#[test]
fn c8_jitter_statistics_and_table_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = SyntheticSpec {
        landmarks: 20,
        ..SyntheticSpec::uniform(10, 7)
    };
    let data = dataset(tmp.path(), &spec);
    let diag = (spec.width as f64).hypot(spec.height as f64);
    let sigma = diag / 100.0;
    let adapter = mock_spec(tmp.path(), &MockKind::Jitter { sigma }, 99, 0);
    let (res, exp) = run_mock(tmp.path(), &data.manifest_path, &adapter, "jitter", &["--workers", "8"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let s = summary_of(&exp);

    // Monte-Carlo: median of n Rayleigh(sigma) radii over the diagonal
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let normal = Normal::new(0.0, sigma).unwrap();
    let draws = 100_000;
    let mut acc = 0.0;
    for _ in 0..draws {
        let radii: Vec<f64> = (0..spec.landmarks)
            .map(|_| f64::hypot(normal.sample(&mut rng), normal.sample(&mut rng)))
            .collect();
        acc += stats::median(&radii).unwrap() / diag;
    }
    let expected = acc / draws as f64;
    let rel = (s.avg_median_rtre - expected).abs() / expected;
    let stats_ok = s.case_count >= 200 && rel <= 0.15;

    // formatter check on a hand-built summary
    let hand = DatasetSummary {
        method: "ANTs".into(),
        scope: "10k".into(),
        avg_median_rtre: 0.023,
        std_median_rtre: 0.02,
        median_median_rtre: 0.0167,
        avg_max_rtre: 0.0556,
        std_max_rtre: 0.0366,
        avg_robustness: 0.7902,
        std_robustness: 0.2482,
        median_robustness: 0.8925,
        avg_time_min: 52.17,
        std_time_min: 26.89,
        case_count: 108,
        failure_count: 0,
    };
    let table = render_summary_table(&[hand]).unwrap();
    let mut lines = table.csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row = lines.next().unwrap();
    let layout_ok = header.len() == 12
        && header[0] == "methods"
        && header[1] == "scope"
        && row == "ANTs,10k,2.30,2.00,1.67,5.56,3.66,79.02,24.82,89.25,52.17,26.89"
        && table.markdown.contains("| ANTs | 10k | 2.30 | ±2.00 | 1.67 | 5.56 | ±3.66 | 79.02 | ±24.82 | 89.25 | 52.17 | ±26.89 |");
    verdict(
        8,
        stats_ok && layout_ok,
        format!(
            "{} cases, mean MrTRE {:.6} vs Monte-Carlo {expected:.6} ({:.1}% off); table row {row}",
            s.case_count,
            s.avg_median_rtre,
            rel * 100.0
        ),
    );
}

#[test]
fn c9_report_structure() {
    let tmp = tempfile::tempdir().unwrap();
    let data = dataset(tmp.path(), &SyntheticSpec::uniform(2, 3));
    let mut exps = Vec::new();
    for (name, kind) in [
        ("identity", MockKind::Identity),
        ("oracle", MockKind::Oracle),
        ("jitter", MockKind::Jitter { sigma: 3.0 }),
    ] {
        let spec = mock_spec(tmp.path(), &kind, 1, 0);
        let (res, exp) = run_mock(tmp.path(), &data.manifest_path, &spec, name, &["--visual", "--workers", "4"]);
        assert_eq!(code(&res), 0, "{}", stderr(&res));
        exps.push(exp);
    }

    // overlays: 3 segments per landmark in green/blue/red groups
    let mut overlay_ok = true;
    for row in rows(&exps[2]) {
        let n = row.metrics.as_ref().unwrap().landmark_count_used;
        let text = svg(&exps[2].join(format!("cases/{}/overlay.svg", row.case_id)));
        let doc = roxmltree::Document::parse(&text).unwrap();
        let lines = doc.descendants().filter(|d| d.has_tag_name("line")).count();
        let colours: Vec<(&str, usize)> = doc
            .descendants()
            .filter(|d| d.has_tag_name("g") && d.children().any(|c| c.has_tag_name("line")))
            .map(|g| (g.attribute("stroke").unwrap(), g.children().filter(|c| c.has_tag_name("line")).count()))
            .collect();
        overlay_ok &= lines == 3 * n && colours == [("green", n), ("blue", n), ("red", n)];
    }

    // radar: weakness axis is 1 - robustness
    let summaries: Vec<DatasetSummary> = exps.iter().map(|e| summary_of(e)).collect();
    let weakness_ok = summaries
        .iter()
        .all(|s| radar_value(s, RadarAxis::Weakness) == 1.0 - s.avg_robustness);
    let scaled = radar_scaled(&summaries, &RadarAxis::ALL).unwrap();
    let w_axis = RadarAxis::ALL.iter().position(|a| *a == RadarAxis::Weakness).unwrap();
    // identity never improves (weakness 1), oracle always does (weakness 0)
    let radar_ok = weakness_ok && scaled[0][w_axis] == 1.0 && scaled[1][w_axis] == 0.0;

    // combined boxplot ordered by increasing AMrTRE
    let out = tmp.path().join("combined");
    let mut args = vec!["report".to_string()];
    args.extend(exps.iter().map(|e| e.display().to_string()));
    args.extend(["--chart", "boxplot", "--chart", "radar", "--metric", "MrTRE", "--out"].map(String::from));
    args.push(out.display().to_string());
    let res = bin().args(&args).output().unwrap();
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let text = svg(&out.join("boxplot_MrTRE.svg"));
    let doc = roxmltree::Document::parse(&text).unwrap();
    let order: Vec<&str> = doc
        .descendants()
        .filter(|d| d.attribute("class") == Some("box"))
        .map(|d| d.attribute("data-method").unwrap())
        .collect();
    let mut by_amrtre: Vec<&DatasetSummary> = summaries.iter().collect();
    by_amrtre.sort_by(|a, b| a.avg_median_rtre.total_cmp(&b.avg_median_rtre));
    let expected: Vec<&str> = by_amrtre.iter().map(|s| s.method.as_str()).collect();
    let radar_doc = svg(&out.join("radar.svg"));
    let polygons = roxmltree::Document::parse(&radar_doc)
        .unwrap()
        .descendants()
        .filter(|d| d.attribute("class") == Some("method"))
        .count();
    let box_ok = order == expected && polygons == 3;

    verdict(
        9,
        overlay_ok && radar_ok && box_ok,
        format!("overlays 3n: {overlay_ok}, weakness = 1 - R: {radar_ok}, box order {order:?}"),
    );
}
