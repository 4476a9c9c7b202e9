//! Landmark files, image geometry, sample manifests and registration pairs.

mod geometry;
mod landmarks;
mod manifest;
mod pairing;

use std::path::PathBuf;

use thiserror::Error;

pub use geometry::{read_image_geometry, ImageGeometry};
pub use landmarks::{
    parse_landmark_file, scale_landmarks, truncate_to_common, write_landmark_file, LandmarkSet,
    Point,
};
pub use manifest::{generate_pairs, load_manifest, ImageEntry, Manifest, SampleManifest};
pub use pairing::{load_pairing_table, write_pairing_table, RegistrationCase, PAIRING_HEADER};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: malformed row {line}: {reason}")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{0}: file contains no landmarks")]
    EmptyFile(PathBuf),
    #[error("{path}: row {line} has fewer than two columns")]
    MissingColumns { path: PathBuf, line: usize },
    #[error("refusing to write an empty landmark set")]
    EmptySet,
    #[error("landmark set is empty")]
    EmptyInput,
    #[error("scale factor must be positive, got {0}")]
    NonPositiveFactor(f64),
    #[error("{0}: unsupported image format (PNG and JPEG only)")]
    UnsupportedFormat(PathBuf),
    #[error("{path}: corrupt image header: {reason}")]
    CorruptHeader { path: PathBuf, reason: String },
    #[error("invalid image size {width}x{height}")]
    InvalidGeometry { width: u32, height: u32 },
    #[error("sample {sample}: image {image} listed twice")]
    DuplicateImageInSample { sample: String, image: PathBuf },
    #[error("sample {sample} has no scale entry for scope {scope:?}")]
    UnknownScope { sample: String, scope: String },
    #[error("manifest {path}: {reason}")]
    InvalidManifest { path: PathBuf, reason: String },
    #[error("pairing table {path}: missing required column {column:?}")]
    MissingRequiredColumn { path: PathBuf, column: String },
    #[error("pairing table {path}: row {row} references missing file {missing}")]
    NonexistentPathStrict {
        path: PathBuf,
        row: usize,
        missing: PathBuf,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl DatasetError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = DatasetError> = std::result::Result<T, E>;
