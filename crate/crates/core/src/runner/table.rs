//! The append-only results table (`results.csv`).
//!
//! Every terminal case is one line, written with a single `write_all` under
//! a lock and synced. After a crash the only possible damage is a partial
//! final line, which readers drop and [`repair_table`] truncates.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{Result, RunnerError};
use crate::metrics::{CaseMetrics, CaseStatus};

pub const RESULTS_FILE: &str = "results.csv";

/// Column order of `results.csv`. rTRE columns are ratios; times are
/// seconds with three decimals.
pub const RESULTS_HEADER: [&str; 16] = [
    "case_id",
    "status",
    "exit_code",
    "wall_time_s",
    "normalized_time_s",
    "landmarks_used",
    "initial_median_rtre",
    "initial_max_rtre",
    "final_median_rtre",
    "final_max_rtre",
    "robustness",
    "fixed_image",
    "moving_image",
    "fixed_landmarks",
    "moving_landmarks",
    "warped_landmarks",
];

/// One line of the results table. Metric fields are absent for visual-only
/// cases and cases whose inputs could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub case_id: usize,
    pub status: CaseStatus,
    pub exit_code: Option<i32>,
    pub wall_time_s: f64,
    pub normalized_time_s: f64,
    pub metrics: Option<CaseMetrics>,
    pub fixed_image: PathBuf,
    pub moving_image: PathBuf,
    pub fixed_landmarks: Option<PathBuf>,
    pub moving_landmarks: Option<PathBuf>,
    pub warped_landmarks: Option<PathBuf>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

impl ResultRow {
    pub fn to_record(&self) -> Vec<String> {
        let m = self.metrics.as_ref();
        vec![
            self.case_id.to_string(),
            self.status.to_string(),
            opt(self.exit_code),
            format!("{:.3}", self.wall_time_s),
            format!("{:.3}", self.normalized_time_s),
            opt(m.map(|m| m.landmark_count_used)),
            opt(m.map(|m| m.initial_median_rtre)),
            opt(m.map(|m| m.initial_max_rtre)),
            opt(m.map(|m| m.final_median_rtre)),
            opt(m.map(|m| m.final_max_rtre)),
            opt(m.map(|m| m.robustness)),
            self.fixed_image.display().to_string(),
            self.moving_image.display().to_string(),
            opt_path(&self.fixed_landmarks),
            opt_path(&self.moving_landmarks),
            opt_path(&self.warped_landmarks),
        ]
    }

    pub fn from_record(record: &csv::StringRecord) -> std::result::Result<Self, String> {
        if record.len() != RESULTS_HEADER.len() {
            return Err(format!("expected {} fields, found {}", RESULTS_HEADER.len(), record.len()));
        }
        fn num<T: std::str::FromStr>(s: &str, col: &str) -> std::result::Result<T, String> {
            s.parse().map_err(|_| format!("bad {col} {s:?}"))
        }
        fn opt_num<T: std::str::FromStr>(s: &str, col: &str) -> std::result::Result<Option<T>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s, col).map(Some)
            }
        }
        let path = |s: &str| (!s.is_empty()).then(|| PathBuf::from(s));
        let case_id = num(&record[0], "case_id")?;
        let status: CaseStatus = num(&record[1], "status")?;
        let wall_time_s = num(&record[3], "wall_time_s")?;
        let normalized_time_s = num(&record[4], "normalized_time_s")?;
        let fields: Vec<Option<f64>> = (6..11)
            .map(|i| opt_num(&record[i], RESULTS_HEADER[i]))
            .collect::<std::result::Result<_, _>>()?;
        let used: Option<usize> = opt_num(&record[5], "landmarks_used")?;
        let metrics = match (used, fields.as_slice()) {
            (Some(n), [Some(a), Some(b), Some(c), Some(d), Some(r)]) => Some(CaseMetrics {
                case_id,
                status,
                initial_median_rtre: *a,
                initial_max_rtre: *b,
                final_median_rtre: *c,
                final_max_rtre: *d,
                robustness: *r,
                landmark_count_used: n,
                wall_time_s,
                normalized_time_s,
            }),
            (None, [None, None, None, None, None]) => None,
            _ => return Err("partially filled metric columns".into()),
        };
        Ok(ResultRow {
            case_id,
            status,
            exit_code: opt_num(&record[2], "exit_code")?,
            wall_time_s,
            normalized_time_s,
            metrics,
            fixed_image: PathBuf::from(&record[11]),
            moving_image: PathBuf::from(&record[12]),
            fixed_landmarks: path(&record[13]),
            moving_landmarks: path(&record[14]),
            warped_landmarks: path(&record[15]),
        })
    }

    /// The metric columns exactly as stored (times excluded).
    pub fn metric_columns(&self) -> Vec<String> {
        let rec = self.to_record();
        let mut cols = vec![rec[0].clone(), rec[1].clone()];
        cols.extend_from_slice(&rec[5..11]);
        cols
    }
}

fn encode_line(fields: &[String]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(fields).expect("in-memory csv write");
    w.into_inner().expect("in-memory csv flush")
}

fn header_line() -> Vec<u8> {
    let fields: Vec<String> = RESULTS_HEADER.iter().map(|s| s.to_string()).collect();
    encode_line(&fields)
}

/// Creates `path` with only the header.
pub fn create_table(path: &Path) -> Result<()> {
    fs::write(path, header_line()).map_err(|e| RunnerError::io(path, e))
}

/// Result of reading a table that may end in a partial line.
#[derive(Debug, Clone, PartialEq)]
pub struct TableScan {
    pub rows: Vec<ResultRow>,
    /// Byte length of the valid prefix.
    pub valid_len: u64,
    /// The discarded trailing fragment, if any.
    pub dropped: Option<String>,
}

pub fn scan_table(path: &Path) -> Result<TableScan> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(RunnerError::MissingTable(path.to_path_buf()))
        }
        Err(e) => return Err(RunnerError::io(path, e)),
    };
    let unreadable = |reason: String| RunnerError::TableUnreadable {
        path: path.to_path_buf(),
        reason,
    };
    let header = header_line();
    let mut scan = TableScan {
        rows: Vec::new(),
        valid_len: 0,
        dropped: None,
    };
    if bytes.is_empty() {
        return Ok(scan);
    }
    if !bytes.starts_with(&header) {
        if header.starts_with(&bytes) {
            // crashed while writing the header
            scan.dropped = Some(String::from_utf8_lossy(&bytes).into_owned());
            return Ok(scan);
        }
        return Err(unreadable("unexpected header".into()));
    }
    let mut offset = header.len();
    scan.valid_len = offset as u64;
    let mut seen = BTreeSet::new();
    while offset < bytes.len() {
        let rest = &bytes[offset..];
        let Some(nl) = rest.iter().position(|b| *b == b'\n') else {
            scan.dropped = Some(String::from_utf8_lossy(rest).into_owned());
            break;
        };
        let line = &rest[..=nl];
        let is_last = offset + line.len() == bytes.len();
        let parsed = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(line)
            .records()
            .next()
            .ok_or_else(|| "empty line".to_string())
            .and_then(|r| r.map_err(|e| e.to_string()))
            .and_then(|r| ResultRow::from_record(&r));
        match parsed {
            Ok(row) => {
                if seen.insert(row.case_id) {
                    scan.rows.push(row);
                } else {
                    log::warn!("{}: duplicate row for case {} ignored", path.display(), row.case_id);
                }
            }
            Err(reason) if is_last => {
                log::debug!("unparseable final line: {reason}");
                scan.dropped = Some(String::from_utf8_lossy(line).into_owned());
                break;
            }
            Err(reason) => {
                return Err(unreadable(format!("line at byte {offset}: {reason}")));
            }
        }
        offset += line.len();
        scan.valid_len = offset as u64;
    }
    if let Some(frag) = &scan.dropped {
        log::warn!(
            "{}: dropping partial final line {:?}",
            path.display(),
            frag.chars().take(80).collect::<String>()
        );
    }
    Ok(scan)
}

/// Reads every complete row.
pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    Ok(scan_table(path)?.rows)
}

/// Ids of every case with a terminal row in `<experiment_dir>/results.csv`.
pub fn detect_completed(experiment_dir: &Path) -> Result<BTreeSet<usize>> {
    let scan = scan_table(&experiment_dir.join(RESULTS_FILE))?;
    Ok(scan.rows.iter().map(|r| r.case_id).collect())
}

/// Cuts a partial final line (or rewrites a missing header) so appends
/// start on a clean line.
pub fn repair_table(path: &Path) -> Result<()> {
    let scan = scan_table(path)?;
    if scan.valid_len == 0 {
        return create_table(path);
    }
    if scan.dropped.is_some() {
        let file = OpenOptions::new()
            .write(true)
            .open(path)
            .map_err(|e| RunnerError::io(path, e))?;
        file.set_len(scan.valid_len).map_err(|e| RunnerError::io(path, e))?;
        file.sync_all().map_err(|e| RunnerError::io(path, e))?;
    }
    Ok(())
}

/// Shared appender; one row per call, serialized by a mutex.
#[derive(Debug)]
pub struct ResultsSink {
    path: PathBuf,
    file: Mutex<File>,
}

impl ResultsSink {
    pub fn open(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|e| RunnerError::io(path, e))?;
        Ok(ResultsSink {
            path: path.to_path_buf(),
            file: Mutex::new(file),
        })
    }

    pub fn append(&self, row: &ResultRow) -> Result<()> {
        let line = encode_line(&row.to_record());
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(&line)
            .and_then(|_| file.sync_data())
            .map_err(|e| RunnerError::io(&self.path, e))
    }
}
