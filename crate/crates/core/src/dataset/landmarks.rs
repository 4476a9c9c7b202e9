use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{DatasetError, Result};

/// A 2D landmark position in pixels, origin at the top-left image corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// Ordered landmark annotation of one image.
///
/// Row `i` of two sets from the same tissue sample marks the same structure,
/// so the order is part of the data.
#[derive(Debug, Clone, Default)]
pub struct LandmarkSet {
    points: Vec<Point>,
    source_path: Option<PathBuf>,
}

impl PartialEq for LandmarkSet {
    // provenance is not part of the value
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl LandmarkSet {
    pub fn new(points: Vec<Point>) -> Self {
        LandmarkSet {
            points,
            source_path: None,
        }
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Self {
        Self::new(coords.iter().copied().map(Point::from).collect())
    }

    pub fn with_source(mut self, path: impl Into<PathBuf>) -> Self {
        self.source_path = Some(path.into());
        self
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn source_path(&self) -> Option<&Path> {
        self.source_path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Keeps the first `n` rows.
    pub fn truncated(&self, n: usize) -> Self {
        LandmarkSet {
            points: self.points[..n.min(self.points.len())].to_vec(),
            source_path: self.source_path.clone(),
        }
    }

    pub fn map(&self, f: impl FnMut(Point) -> Point) -> Self {
        LandmarkSet {
            points: self.points.iter().copied().map(f).collect(),
            source_path: None,
        }
    }
}

impl<'a> IntoIterator for &'a LandmarkSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

fn parse_coord(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads an ImageJ-style landmark CSV.
///
/// The last two columns of every row are X and Y. A header row (detected by
/// non-numeric coordinate cells in the first row) and a leading index column
/// are accepted and ignored.
pub fn parse_landmark_file(path: impl AsRef<Path>) -> Result<LandmarkSet> {
    let path = path.as_ref();
    let body = fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());

    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|source| DatasetError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let line = row + 1;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() < 2 {
            return Err(DatasetError::MissingColumns {
                path: path.to_path_buf(),
                line,
            });
        }
        let x_field = &record[record.len() - 2];
        let y_field = &record[record.len() - 1];
        match (parse_coord(x_field), parse_coord(y_field)) {
            (Some(x), Some(y)) => points.push(Point::new(x, y)),
            _ if row == 0 => continue, // header
            _ => {
                return Err(DatasetError::MalformedRow {
                    path: path.to_path_buf(),
                    line,
                    reason: format!("non-numeric coordinate in ({x_field:?}, {y_field:?})"),
                })
            }
        }
    }

    if points.is_empty() {
        return Err(DatasetError::EmptyFile(path.to_path_buf()));
    }
    Ok(LandmarkSet::new(points).with_source(path))
}

/// Writes the header `,X,Y` followed by `<index>,<x>,<y>` rows.
///
/// Floats are printed in their shortest round-trip form, so parsing the file
/// back reproduces every coordinate bit for bit.
pub fn write_landmark_file(set: &LandmarkSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if set.is_empty() {
        return Err(DatasetError::EmptySet);
    }
    let mut out = String::with_capacity(16 + set.len() * 24);
    out.push_str(",X,Y\n");
    for (i, p) in set.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", p.x, p.y));
    }
    let mut file = fs::File::create(path).map_err(|e| DatasetError::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| DatasetError::io(path, e))
}

pub fn scale_landmarks(set: &LandmarkSet, factor: f64) -> Result<LandmarkSet> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(DatasetError::NonPositiveFactor(factor));
    }
    Ok(set.map(|p| Point::new(p.x * factor, p.y * factor)))
}

/// Cuts both sets to their common prefix length, warning when they differ.
pub fn truncate_to_common(
    fixed: &LandmarkSet,
    other: &LandmarkSet,
) -> Result<(LandmarkSet, LandmarkSet)> {
    if fixed.is_empty() || other.is_empty() {
        return Err(DatasetError::EmptyInput);
    }
    let n = fixed.len().min(other.len());
    if fixed.len() != other.len() {
        log::warn!(
            "landmark count mismatch ({} vs {}), using the first {n} rows of {} and {}",
            fixed.len(),
            other.len(),
            display_source(fixed),
            display_source(other),
        );
    }
    Ok((fixed.truncated(n), other.truncated(n)))
}

fn display_source(set: &LandmarkSet) -> String {
    set.source_path()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "<memory>".into())
}
