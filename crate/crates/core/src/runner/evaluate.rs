use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::experiment::Experiment;
use super::table::ResultRow;
use super::{Result, RunnerError};
use crate::dataset::{
    parse_landmark_file, read_image_geometry, ImageGeometry, LandmarkSet, RegistrationCase,
};
use crate::metrics::{
    case_statistics, dataset_aggregate, substitute_failure, CaseMetrics, CaseStatus, CaseTiming,
    DatasetSummary,
};
use crate::report::{self, ChartKind, LabeledMetrics, Metric};

/// Landmark sets of one case after truncation to a common length.
#[derive(Debug, Clone)]
pub struct EvaluatedCase {
    pub metrics: CaseMetrics,
    pub fixed: LandmarkSet,
    pub moving: LandmarkSet,
    pub warped: LandmarkSet,
    pub geometry: ImageGeometry,
}

pub(crate) fn fixed_geometry(case: &RegistrationCase) -> std::result::Result<ImageGeometry, String> {
    match case.fixed_size {
        Some((w, h)) => ImageGeometry::new(w, h),
        None => read_image_geometry(&case.fixed_image),
    }
    .map_err(|e| e.to_string())
}

/// Metrics of one case. `warped` is ignored unless `status` is completed;
/// every other status is evaluated with the moving landmarks in its place.
/// `Ok(None)` for visual-only cases.
pub fn evaluate_case(
    case: &RegistrationCase,
    status: CaseStatus,
    warped: Option<LandmarkSet>,
    timing: CaseTiming,
) -> std::result::Result<Option<EvaluatedCase>, String> {
    let Some((fixed_path, moving_path)) = case.landmark_paths() else {
        return Ok(None);
    };
    let fixed = parse_landmark_file(fixed_path).map_err(|e| e.to_string())?;
    let moving = parse_landmark_file(moving_path).map_err(|e| e.to_string())?;
    let warped = match (status, warped) {
        (CaseStatus::Completed, Some(w)) => w,
        (CaseStatus::Completed, None) => return Err("completed case without warped landmarks".into()),
        (s, _) => substitute_failure(s, &moving).map_err(|e| e.to_string())?,
    };
    let n = fixed.len().min(moving.len()).min(warped.len());
    if n != fixed.len() || n != moving.len() || n != warped.len() {
        log::warn!(
            "case {}: landmark counts differ (fixed {}, moving {}, warped {}), using the first {n}",
            case.case_id,
            fixed.len(),
            moving.len(),
            warped.len()
        );
    }
    let (fixed, moving, warped) = (fixed.truncated(n), moving.truncated(n), warped.truncated(n));
    let geometry = fixed_geometry(case)?;
    let metrics = case_statistics(
        case.case_id,
        status,
        &fixed,
        &moving,
        &warped,
        geometry.diagonal(),
        timing,
    )
    .map_err(|e| e.to_string())?;
    Ok(Some(EvaluatedCase {
        metrics,
        fixed,
        moving,
        warped,
        geometry,
    }))
}

/// Recomputes per-case metrics from the stored table and warped files.
///
/// A completed row whose warped landmarks are gone or unreadable is
/// evaluated as failed. Visual-only cases, rows without a matching case and
/// cases whose inputs cannot be read are skipped with a warning. Output is
/// sorted by case id.
pub fn evaluate_all(table: &[ResultRow], cases: &[RegistrationCase]) -> Vec<CaseMetrics> {
    let by_id: HashMap<usize, &RegistrationCase> = cases.iter().map(|c| (c.case_id, c)).collect();
    let mut rows: Vec<&ResultRow> = table.iter().collect();
    rows.sort_by_key(|r| r.case_id);
    if rows.len() < cases.len() {
        log::warn!("{} of {} cases have no result row", cases.len() - rows.len(), cases.len());
    }
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let Some(case) = by_id.get(&row.case_id) else {
            log::warn!("result row for unknown case {}", row.case_id);
            continue;
        };
        let mut status = row.status;
        let mut warped = None;
        if status == CaseStatus::Completed {
            match row.warped_landmarks.as_deref().map(parse_landmark_file) {
                Some(Ok(set)) => warped = Some(set),
                Some(Err(e)) => {
                    log::warn!("case {}: {e}; evaluating as failed", row.case_id);
                    status = CaseStatus::Failed;
                }
                None => {
                    log::warn!("case {}: no warped landmarks; evaluating as failed", row.case_id);
                    status = CaseStatus::Failed;
                }
            }
        }
        let timing = CaseTiming {
            wall_time_s: row.wall_time_s,
            normalized_time_s: row.normalized_time_s,
        };
        match evaluate_case(case, status, warped, timing) {
            Ok(Some(ev)) => out.push(ev.metrics),
            Ok(None) => {}
            Err(e) => log::warn!("case {} not evaluated: {e}", row.case_id),
        }
    }
    out
}

/// Attaches method, scope and tissue labels to per-case metrics.
pub fn label_metrics(
    metrics: &[CaseMetrics],
    cases: &[RegistrationCase],
    method: &str,
    default_scope: &str,
) -> Vec<LabeledMetrics> {
    let by_id: HashMap<usize, &RegistrationCase> = cases.iter().map(|c| (c.case_id, c)).collect();
    metrics
        .iter()
        .map(|m| {
            let case = by_id.get(&m.case_id);
            let scope = case.map(|c| c.scope.as_str()).filter(|s| !s.is_empty());
            LabeledMetrics {
                method: method.to_string(),
                scope: scope.unwrap_or(default_scope).to_string(),
                tissue: case.map(|c| c.tissue_type.clone()).unwrap_or_default(),
                metrics: m.clone(),
            }
        })
        .collect()
}

/// One summary per (method, scope) in order of first appearance.
pub fn summarize(records: &[LabeledMetrics]) -> Result<Vec<DatasetSummary>> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in records {
        let k = (r.method.as_str(), r.scope.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(method, scope)| {
            let group: Vec<CaseMetrics> = records
                .iter()
                .filter(|r| r.method == method && r.scope == scope)
                .map(|r| r.metrics.clone())
                .collect();
            Ok(dataset_aggregate(&group, method, scope)?)
        })
        .collect()
}

#[derive(serde::Serialize)]
struct SummaryDoc<'a> {
    summary: &'a [DatasetSummary],
}

fn write(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| RunnerError::io(path, e))
}

/// Writes the summary table and the requested charts into `out_dir`.
/// Returns the written paths. A distribution chart needs two scopes.
pub fn write_report(
    records: &[LabeledMetrics],
    out_dir: &Path,
    kinds: &[ChartKind],
    metrics: &[Metric],
) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| RunnerError::io(out_dir, e))?;
    let summaries = summarize(records)?;
    let table = report::render_summary_table(&summaries)?;
    let mut written = Vec::new();
    for (name, body) in [("table.csv", &table.csv), ("table.md", &table.markdown)] {
        let p = out_dir.join(name);
        write(&p, body)?;
        written.push(p);
    }
    let mut scopes: Vec<&str> = Vec::new();
    for r in records {
        if !scopes.contains(&r.scope.as_str()) {
            scopes.push(&r.scope);
        }
    }
    for &kind in kinds {
        let per_metric: Vec<Option<Metric>> = match kind {
            ChartKind::Radar => vec![None],
            ChartKind::Overlay => continue,
            _ => metrics.iter().copied().map(Some).collect(),
        };
        for metric in per_metric {
            let svg = match (kind, metric) {
                (ChartKind::Radar, _) => report::render_radar(&summaries, &report::RadarAxis::ALL)?,
                (ChartKind::Boxplot, Some(m)) => report::render_boxplots(records, m)?,
                (ChartKind::TissueBars, Some(m)) => report::render_tissue_breakdown(records, m)?,
                (ChartKind::Distribution, Some(m)) => {
                    let (a, b) = match scopes.as_slice() {
                        [a, b, ..] => (*a, *b),
                        [a] => return Err(report::ReportError::MissingScope(format!("a second scope besides {a:?}")).into()),
                        [] => return Err(report::ReportError::EmptyInput.into()),
                    };
                    report::render_scope_comparison(records, m, a, b)?
                }
                _ => continue,
            };
            let name = report::ChartSpec::default_file_name(kind, metric.unwrap_or(Metric::MrTre));
            let p = out_dir.join(name);
            write(&p, &svg)?;
            written.push(p);
        }
    }
    Ok(written)
}

/// Writes `summary/metrics.csv`, `summary/summary.toml`, the summary table
/// and, with visual reports on, the chart suite.
pub fn export_summary(
    experiment: &Experiment,
    metrics: &[CaseMetrics],
    cases: &[RegistrationCase],
) -> Result<Vec<DatasetSummary>> {
    if metrics.is_empty() {
        return Err(RunnerError::EmptyGroup);
    }
    let dir = experiment.summary_dir();
    fs::create_dir_all(&dir).map_err(|e| RunnerError::io(&dir, e))?;
    let records = label_metrics(metrics, cases, &experiment.adapter.method_name, &experiment.config.scope);
    report::write_metrics_csv(&records, dir.join("metrics.csv"))?;
    let summaries = summarize(&records)?;
    let doc = toml::to_string(&SummaryDoc { summary: &summaries }).expect("summary serializes");
    write(&dir.join("summary.toml"), &doc)?;

    let mut kinds = Vec::new();
    if experiment.config.visual_reports {
        kinds.extend([ChartKind::Radar, ChartKind::Boxplot, ChartKind::TissueBars]);
        if summaries.len() > 1 {
            kinds.push(ChartKind::Distribution);
        }
    }
    write_report(&records, &dir, &kinds, &Metric::ALL)?;
    Ok(summaries)
}

/// Reads `summary/summary.toml` back.
pub fn read_summary(path: &Path) -> Result<Vec<DatasetSummary>> {
    #[derive(serde::Deserialize)]
    struct Doc {
        summary: Vec<DatasetSummary>,
    }
    let text = fs::read_to_string(path).map_err(|e| RunnerError::io(path, e))?;
    let doc: Doc = toml::from_str(&text)
        .map_err(|e| RunnerError::InvalidConfig(format!("{}: {e}", path.display())))?;
    Ok(doc.summary)
}
