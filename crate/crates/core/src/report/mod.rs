//! Summary tables and static SVG charts built from metric records.

mod boxplot;
mod distribution;
mod overlay;
mod radar;
mod svg;
mod table;
mod tissues;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{CaseMetrics, CaseStatus};

pub use boxplot::{box_stats, method_order, render_boxplots, BoxStats};
pub use distribution::{empirical_cdf, render_scope_comparison};
pub use overlay::render_case_overlay;
pub use radar::{radar_scaled, radar_value, render_radar, RadarAxis};
pub use table::{parse_summary_table, render_summary_table, SummaryTable, TableRow};
pub use tissues::{render_tissue_breakdown, tissue_means, TissueBar};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to report")]
    EmptyInput,
    #[error("empty group: {0}")]
    EmptyGroup(String),
    #[error("landmark sets differ in length ({0}, {1}, {2})")]
    LengthMismatch(usize, usize, usize),
    #[error("a radar chart needs at least three distinct axes, got {0}")]
    FewerThanThreeAxes(usize),
    #[error("no records for scope {0:?}")]
    MissingScope(String),
    #[error("unknown metric {0:?} (expected MrTRE, SrTRE, robustness or time)")]
    UnknownMetric(String),
    #[error("unknown chart kind {0:?}")]
    UnknownChart(String),
    #[error("malformed table {path}: {reason}")]
    MalformedTable { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ReportError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ReportError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = ReportError> = std::result::Result<T, E>;

/// Per-case quantity a chart can display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    MrTre,
    SrTre,
    Robustness,
    Time,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::MrTre, Metric::SrTre, Metric::Robustness, Metric::Time];

    pub fn name(self) -> &'static str {
        match self {
            Metric::MrTre => "MrTRE",
            Metric::SrTre => "SrTRE",
            Metric::Robustness => "robustness",
            Metric::Time => "time",
        }
    }

    pub fn axis_label(self) -> &'static str {
        match self {
            Metric::MrTre => "median rTRE",
            Metric::SrTre => "max rTRE",
            Metric::Robustness => "robustness",
            Metric::Time => "time [min]",
        }
    }

    /// The record's value; `None` for the time of a case that never ran.
    pub fn value(self, m: &CaseMetrics) -> Option<f64> {
        match self {
            Metric::MrTre => Some(m.final_median_rtre),
            Metric::SrTre => Some(m.final_max_rtre),
            Metric::Robustness => Some(m.robustness),
            Metric::Time if m.status == CaseStatus::Skipped => None,
            Metric::Time => Some(m.normalized_time_s / 60.0),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ReportError::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Overlay,
    Boxplot,
    Radar,
    Distribution,
    TissueBars,
}

impl ChartKind {
    pub const ALL: [ChartKind; 5] = [
        ChartKind::Overlay,
        ChartKind::Boxplot,
        ChartKind::Radar,
        ChartKind::Distribution,
        ChartKind::TissueBars,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChartKind::Overlay => "overlay",
            ChartKind::Boxplot => "boxplot",
            ChartKind::Radar => "radar",
            ChartKind::Distribution => "distribution",
            ChartKind::TissueBars => "tissue-bars",
        }
    }
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChartKind {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self> {
        ChartKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ReportError::UnknownChart(s.to_string()))
    }
}

/// One requested chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub metric: Metric,
    /// Labels selecting the groups to compare, e.g. the two scopes of a
    /// distribution chart.
    pub grouping: Vec<String>,
    pub output: PathBuf,
}

impl ChartSpec {
    /// File name under `summary/` used when no explicit output is given.
    pub fn default_file_name(kind: ChartKind, metric: Metric) -> String {
        match kind {
            ChartKind::Radar => "radar.svg".into(),
            ChartKind::Boxplot => format!("boxplot_{metric}.svg"),
            ChartKind::Distribution => format!("scopes_{metric}.svg"),
            ChartKind::TissueBars => format!("tissues_{metric}.svg"),
            ChartKind::Overlay => "overlay.svg".into(),
        }
    }
}

/// A case record tagged with the labels charts group by.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMetrics {
    pub method: String,
    pub scope: String,
    pub tissue: String,
    pub metrics: CaseMetrics,
}

/// Flat CSV form of [`LabeledMetrics`].
#[derive(Debug, Serialize, Deserialize)]
struct MetricsRow {
    method: String,
    scope: String,
    tissue: String,
    case_id: usize,
    status: CaseStatus,
    initial_median_rtre: f64,
    initial_max_rtre: f64,
    final_median_rtre: f64,
    final_max_rtre: f64,
    robustness: f64,
    landmark_count_used: usize,
    wall_time_s: f64,
    normalized_time_s: f64,
}

impl From<&LabeledMetrics> for MetricsRow {
    fn from(l: &LabeledMetrics) -> Self {
        let m = &l.metrics;
        MetricsRow {
            method: l.method.clone(),
            scope: l.scope.clone(),
            tissue: l.tissue.clone(),
            case_id: m.case_id,
            status: m.status,
            initial_median_rtre: m.initial_median_rtre,
            initial_max_rtre: m.initial_max_rtre,
            final_median_rtre: m.final_median_rtre,
            final_max_rtre: m.final_max_rtre,
            robustness: m.robustness,
            landmark_count_used: m.landmark_count_used,
            wall_time_s: m.wall_time_s,
            normalized_time_s: m.normalized_time_s,
        }
    }
}

impl From<MetricsRow> for LabeledMetrics {
    fn from(r: MetricsRow) -> Self {
        LabeledMetrics {
            method: r.method,
            scope: r.scope,
            tissue: r.tissue,
            metrics: CaseMetrics {
                case_id: r.case_id,
                status: r.status,
                initial_median_rtre: r.initial_median_rtre,
                initial_max_rtre: r.initial_max_rtre,
                final_median_rtre: r.final_median_rtre,
                final_max_rtre: r.final_max_rtre,
                robustness: r.robustness,
                landmark_count_used: r.landmark_count_used,
                wall_time_s: r.wall_time_s,
                normalized_time_s: r.normalized_time_s,
            },
        }
    }
}

pub fn write_metrics_csv(records: &[LabeledMetrics], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in records {
        w.serialize(MetricsRow::from(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| ReportError::io(path, e))
}

pub fn read_metrics_csv(path: impl AsRef<Path>) -> Result<Vec<LabeledMetrics>> {
    let path = path.as_ref();
    let csv_err = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize::<MetricsRow>()
        .map(|row| row.map(LabeledMetrics::from).map_err(csv_err))
        .collect()
}

/// Groups preserving first-appearance order of keys.
pub(crate) fn group_by<'a, T, K: PartialEq + Clone>(
    items: &'a [T],
    key: impl Fn(&T) -> K,
) -> Vec<(K, Vec<&'a T>)> {
    let mut groups: Vec<(K, Vec<&T>)> = Vec::new();
    for item in items {
        let k = key(item);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, members)) => members.push(item),
            None => groups.push((k, vec![item])),
        }
    }
    groups
}

pub(crate) fn metric_values(records: &[&LabeledMetrics], metric: Metric) -> Vec<f64> {
    records.iter().filter_map(|r| metric.value(&r.metrics)).collect()
}


#[cfg(test)]
mod tests {
    use super::fixtures::record;
    use super::*;

    #[test]
    fn metric_names_parse() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert_eq!("mrtre".parse::<Metric>().unwrap(), Metric::MrTre);
        assert!("dice".parse::<Metric>().is_err());
        assert_eq!("tissue-bars".parse::<ChartKind>().unwrap(), ChartKind::TissueBars);
    }

    #[test]
    fn time_is_minutes_and_skips_unrun() {
        let mut r = record("m", "s", "t", 0, 0.1);
        assert_eq!(Metric::Time.value(&r.metrics), Some(2.0));
        r.metrics.status = CaseStatus::Skipped;
        assert_eq!(Metric::Time.value(&r.metrics), None);
        assert_eq!(Metric::MrTre.value(&r.metrics), Some(0.1));
    }

    #[test]
    fn metrics_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        let recs = vec![
            record("a", "10k", "lung", 0, 0.012345678901234),
            record("a", "10k", "kidney, left", 1, 1e-17),
        ];
        write_metrics_csv(&recs, &path).unwrap();
        assert_eq!(read_metrics_csv(&path).unwrap(), recs);
    }

    #[test]
    fn grouping_keeps_first_appearance() {
        let v = [3, 1, 3, 2, 1];
        let g = group_by(&v, |x| *x);
        let keys: Vec<_> = g.iter().map(|(k, m)| (*k, m.len())).collect();
        assert_eq!(keys, vec![(3, 2), (1, 2), (2, 1)]);
    }
}
