use std::fs;
use std::path::Path;

use image::{ImageFormat, ImageReader};

use super::{DatasetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageGeometry {
    width: u32,
    height: u32,
}

impl ImageGeometry {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(DatasetError::InvalidGeometry { width, height });
        }
        Ok(ImageGeometry { width, height })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn diagonal(&self) -> f64 {
        (self.width as f64).hypot(self.height as f64)
    }
}

/// Reads width and height from a PNG or JPEG header.
///
/// Only the header is decoded; pixel data is never loaded.
pub fn read_image_geometry(path: impl AsRef<Path>) -> Result<ImageGeometry> {
    let path = path.as_ref();
    let meta = fs::metadata(path).map_err(|e| DatasetError::io(path, e))?;
    if meta.len() == 0 {
        return Err(DatasetError::CorruptHeader {
            path: path.to_path_buf(),
            reason: "empty file".into(),
        });
    }
    let reader = ImageReader::open(path)
        .and_then(|r| r.with_guessed_format())
        .map_err(|e| DatasetError::io(path, e))?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Jpeg) => {}
        _ => return Err(DatasetError::UnsupportedFormat(path.to_path_buf())),
    }
    let (width, height) = reader
        .into_dimensions()
        .map_err(|e| DatasetError::CorruptHeader {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    ImageGeometry::new(width, height)
}
