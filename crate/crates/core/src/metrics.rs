//! Landmark-based registration accuracy.
//!
//! TRE is the Euclidean distance between a fixed landmark and its warped
//! counterpart; rTRE divides it by the fixed image diagonal. Per case the
//! median (MrTRE) and maximum (SrTRE) of rTRE are kept together with the
//! robustness, the fraction of landmarks whose TRE strictly improved over the
//! initial position. Over a dataset these are aggregated by mean and median
//! (AMrTRE, MMrTRE, ...).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LandmarkSet;
use crate::stats;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("landmark sets differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty landmark set")]
    EmptyInput,
    #[error("image diagonal must be positive, got {0}")]
    NonPositiveDiagonal(f64),
    #[error("case {0} completed; failure substitution applies to failed cases only")]
    NotAFailure(CaseStatus),
    #[error("no records for {method}/{scope}")]
    EmptyGroup { method: String, scope: String },
}

pub type Result<T, E = MetricsError> = std::result::Result<T, E>;

/// Terminal state of one registration case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Completed,
    Failed,
    Timeout,
    /// Not executed because its inputs were unavailable.
    Skipped,
}

impl CaseStatus {
    pub fn is_failure(self) -> bool {
        !matches!(self, CaseStatus::Completed)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CaseStatus::Completed => "completed",
            CaseStatus::Failed => "failed",
            CaseStatus::Timeout => "timeout",
            CaseStatus::Skipped => "skipped",
        }
    }
}

impl fmt::Display for CaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "completed" => Ok(CaseStatus::Completed),
            "failed" => Ok(CaseStatus::Failed),
            "timeout" => Ok(CaseStatus::Timeout),
            "skipped" => Ok(CaseStatus::Skipped),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

fn check_pair(a: &LandmarkSet, b: &LandmarkSet) -> Result<()> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(())
}

/// Row-wise Euclidean distances in pixels.
pub fn euclidean_tre(a: &LandmarkSet, b: &LandmarkSet) -> Result<Vec<f64>> {
    check_pair(a, b)?;
    Ok(a.iter().zip(b.iter()).map(|(p, q)| p.distance(q)).collect())
}

pub fn relative_tre(tres: &[f64], diagonal: f64) -> Result<Vec<f64>> {
    if !(diagonal > 0.0) {
        return Err(MetricsError::NonPositiveDiagonal(diagonal));
    }
    Ok(tres.iter().map(|t| t / diagonal).collect())
}

/// Fraction of landmarks whose TRE to `fixed` is strictly smaller after
/// warping than at the initial `moving` position. Ties count as not improved.
pub fn robustness(fixed: &LandmarkSet, moving: &LandmarkSet, warped: &LandmarkSet) -> Result<f64> {
    let initial = euclidean_tre(fixed, moving)?;
    let fin = euclidean_tre(fixed, warped)?;
    let improved = fin.iter().zip(&initial).filter(|(f, i)| f < i).count();
    Ok(improved as f64 / initial.len() as f64)
}

/// A failed or timed-out registration is evaluated as if it returned the
/// moving landmarks unchanged.
pub fn substitute_failure(status: CaseStatus, moving: &LandmarkSet) -> Result<LandmarkSet> {
    if !status.is_failure() {
        return Err(MetricsError::NotAFailure(status));
    }
    Ok(moving.clone())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseTiming {
    pub wall_time_s: f64,
    pub normalized_time_s: f64,
}

/// Per-case accuracy record. rTRE fields are ratios, not percents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseMetrics {
    pub case_id: usize,
    pub status: CaseStatus,
    pub initial_median_rtre: f64,
    pub initial_max_rtre: f64,
    /// MrTRE
    pub final_median_rtre: f64,
    /// SrTRE
    pub final_max_rtre: f64,
    pub robustness: f64,
    pub landmark_count_used: usize,
    pub wall_time_s: f64,
    pub normalized_time_s: f64,
}

/// Computes initial (fixed vs moving) and final (fixed vs warped) statistics.
///
/// The three sets must already share one length.
pub fn case_statistics(
    case_id: usize,
    status: CaseStatus,
    fixed: &LandmarkSet,
    moving: &LandmarkSet,
    warped: &LandmarkSet,
    diagonal: f64,
    timing: CaseTiming,
) -> Result<CaseMetrics> {
    let initial = relative_tre(&euclidean_tre(fixed, moving)?, diagonal)?;
    let fin = relative_tre(&euclidean_tre(fixed, warped)?, diagonal)?;
    // lengths were checked above, so the statistics exist
    let median = |v: &[f64]| stats::median(v).unwrap_or_default();
    let max = |v: &[f64]| stats::max(v).unwrap_or_default();
    Ok(CaseMetrics {
        case_id,
        status,
        initial_median_rtre: median(&initial),
        initial_max_rtre: max(&initial),
        final_median_rtre: median(&fin),
        final_max_rtre: max(&fin),
        robustness: robustness(fixed, moving, warped)?,
        landmark_count_used: fixed.len(),
        wall_time_s: timing.wall_time_s,
        normalized_time_s: timing.normalized_time_s,
    })
}

/// Aggregates of one (method, scope) group. Ratios, times in minutes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub method: String,
    pub scope: String,
    /// AMrTRE
    pub avg_median_rtre: f64,
    pub std_median_rtre: f64,
    /// MMrTRE
    pub median_median_rtre: f64,
    pub avg_max_rtre: f64,
    pub std_max_rtre: f64,
    pub avg_robustness: f64,
    pub std_robustness: f64,
    pub median_robustness: f64,
    pub avg_time_min: f64,
    pub std_time_min: f64,
    pub case_count: usize,
    pub failure_count: usize,
}

/// Mean/median cascade over per-case records.
///
/// Failed cases are included with their substituted values. Times use the
/// normalized execution time of every non-skipped case.
pub fn dataset_aggregate(records: &[CaseMetrics], method: &str, scope: &str) -> Result<DatasetSummary> {
    if records.is_empty() {
        return Err(MetricsError::EmptyGroup {
            method: method.to_string(),
            scope: scope.to_string(),
        });
    }
    let column = |f: fn(&CaseMetrics) -> f64| records.iter().map(f).collect::<Vec<_>>();
    let mrtre = column(|r| r.final_median_rtre);
    let srtre = column(|r| r.final_max_rtre);
    let robust = column(|r| r.robustness);
    let times: Vec<f64> = records
        .iter()
        .filter(|r| r.status != CaseStatus::Skipped)
        .map(|r| r.normalized_time_s / 60.0)
        .collect();

    Ok(DatasetSummary {
        method: method.to_string(),
        scope: scope.to_string(),
        avg_median_rtre: stats::mean(&mrtre).unwrap_or_default(),
        std_median_rtre: stats::std_dev(&mrtre).unwrap_or_default(),
        median_median_rtre: stats::median(&mrtre).unwrap_or_default(),
        avg_max_rtre: stats::mean(&srtre).unwrap_or_default(),
        std_max_rtre: stats::std_dev(&srtre).unwrap_or_default(),
        avg_robustness: stats::mean(&robust).unwrap_or_default(),
        std_robustness: stats::std_dev(&robust).unwrap_or_default(),
        median_robustness: stats::median(&robust).unwrap_or_default(),
        avg_time_min: stats::mean(&times).unwrap_or_default(),
        std_time_min: stats::std_dev(&times).unwrap_or_default(),
        case_count: records.len(),
        failure_count: records.iter().filter(|r| r.status.is_failure()).count(),
    })
}
