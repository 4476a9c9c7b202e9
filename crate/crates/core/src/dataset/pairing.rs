use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use super::{DatasetError, Result};

/// Required leading columns of a pairing table.
pub const PAIRING_HEADER: [&str; 4] = [
    "Target image",
    "Source image",
    "Target landmarks",
    "Source landmarks",
];

const EXTRA_COLUMNS: [&str; 6] = [
    "Tissue",
    "Sample",
    "Scope",
    "Scale [%]",
    "Target width",
    "Target height",
];

/// One fixed/moving image pair.
///
/// In pairing tables the fixed image is the "target" and the moving image the
/// "source".
#[derive(Debug, Clone, PartialEq)]
pub struct RegistrationCase {
    pub case_id: usize,
    pub fixed_image: PathBuf,
    pub moving_image: PathBuf,
    pub fixed_landmarks: Option<PathBuf>,
    pub moving_landmarks: Option<PathBuf>,
    pub tissue_type: String,
    pub sample_name: String,
    pub scope: String,
    pub scale_percent: f64,
    /// Fixed image size when known without reading the image.
    pub fixed_size: Option<(u32, u32)>,
}

impl RegistrationCase {
    /// Cases without both landmark files are executed but not evaluated.
    pub fn is_visual_only(&self) -> bool {
        self.fixed_landmarks.is_none() || self.moving_landmarks.is_none()
    }

    pub fn landmark_paths(&self) -> Option<(&Path, &Path)> {
        self.fixed_landmarks
            .as_deref()
            .zip(self.moving_landmarks.as_deref())
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> DatasetError + '_ {
    move |source| DatasetError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a pairing table, one case per row in row order.
///
/// Rows whose landmark cells are empty (or whose landmark columns are absent)
/// become visual-only cases. Mirrored rows are kept as written. With `strict`
/// every referenced file must exist.
pub fn load_pairing_table(path: impl AsRef<Path>, strict: bool) -> Result<Vec<RegistrationCase>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new(""));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(csv_err(path))?;
    let columns: HashMap<String, usize> = reader
        .headers()
        .map_err(csv_err(path))?
        .iter()
        .enumerate()
        .map(|(i, h)| (h.to_string(), i))
        .collect();
    for required in &PAIRING_HEADER[..2] {
        if !columns.contains_key(*required) {
            return Err(DatasetError::MissingRequiredColumn {
                path: path.to_path_buf(),
                column: required.to_string(),
            });
        }
    }

    let mut cases = Vec::new();
    let mut seen = HashSet::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let cell = |name: &str| -> Option<&str> {
            columns
                .get(name)
                .and_then(|&i| record.get(i))
                .filter(|v| !v.is_empty())
        };
        let resolve = |name: &str| cell(name).map(|v| base.join(v));

        let (Some(fixed_image), Some(moving_image)) =
            (resolve("Target image"), resolve("Source image"))
        else {
            return Err(DatasetError::MalformedRow {
                path: path.to_path_buf(),
                line: row + 2,
                reason: "empty image path".into(),
            });
        };
        let mut fixed_landmarks = resolve("Target landmarks");
        let mut moving_landmarks = resolve("Source landmarks");
        if fixed_landmarks.is_some() != moving_landmarks.is_some() {
            log::warn!(
                "{}: row {} has only one landmark file, treating it as visual-only",
                path.display(),
                row + 2
            );
            fixed_landmarks = None;
            moving_landmarks = None;
        }

        if strict {
            let referenced = [
                Some(&fixed_image),
                Some(&moving_image),
                fixed_landmarks.as_ref(),
                moving_landmarks.as_ref(),
            ];
            if let Some(missing) = referenced.into_iter().flatten().find(|p| !p.exists()) {
                return Err(DatasetError::NonexistentPathStrict {
                    path: path.to_path_buf(),
                    row: row + 2,
                    missing: missing.clone(),
                });
            }
        }

        if seen.contains(&(moving_image.clone(), fixed_image.clone())) {
            log::warn!(
                "{}: row {} mirrors an earlier pair ({} <-> {}); keeping both",
                path.display(),
                row + 2,
                fixed_image.display(),
                moving_image.display()
            );
        }
        seen.insert((fixed_image.clone(), moving_image.clone()));

        let parse_num = |name: &str| cell(name).and_then(|v| v.parse::<f64>().ok());
        let width = parse_num("Target width").map(|v| v as u32);
        let height = parse_num("Target height").map(|v| v as u32);
        cases.push(RegistrationCase {
            case_id: cases.len(),
            fixed_image,
            moving_image,
            fixed_landmarks,
            moving_landmarks,
            tissue_type: cell("Tissue").unwrap_or_default().to_string(),
            sample_name: cell("Sample").unwrap_or_default().to_string(),
            scope: cell("Scope").unwrap_or_default().to_string(),
            scale_percent: parse_num("Scale [%]").unwrap_or(100.0),
            fixed_size: width.zip(height).filter(|&(w, h)| w > 0 && h > 0),
        });
    }
    Ok(cases)
}

/// Writes cases as a pairing table readable by [`load_pairing_table`].
pub fn write_pairing_table(cases: &[RegistrationCase], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(csv_err(path))?;
    writer
        .write_record(PAIRING_HEADER.iter().chain(EXTRA_COLUMNS.iter()))
        .map_err(csv_err(path))?;
    let opt_path = |p: &Option<PathBuf>| {
        p.as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_default()
    };
    for case in cases {
        let (w, h) = case
            .fixed_size
            .map(|(w, h)| (w.to_string(), h.to_string()))
            .unwrap_or_default();
        writer
            .write_record([
                case.fixed_image.display().to_string(),
                case.moving_image.display().to_string(),
                opt_path(&case.fixed_landmarks),
                opt_path(&case.moving_landmarks),
                case.tissue_type.clone(),
                case.sample_name.clone(),
                case.scope.clone(),
                format!("{}", case.scale_percent),
                w,
                h,
            ])
            .map_err(csv_err(path))?;
    }
    writer.flush().map_err(|e| DatasetError::io(path, e))
}
