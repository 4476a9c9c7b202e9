use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DatasetError, RegistrationCase, Result};

/// One stained image of a tissue sample.
///
/// `image` and `landmarks` may contain `{scope}` and `{scale}` tokens, which
/// are replaced by the scope tag and its integer scale percent when pairs are
/// generated (e.g. `lesion_1/scale-{scale}pc/HE.jpg`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub image: PathBuf,
    pub landmarks: PathBuf,
    #[serde(default)]
    pub stain: String,
    /// Explicit size, required for formats without a readable header.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
}

impl ImageEntry {
    pub fn size(&self) -> Option<(u32, u32)> {
        self.width.zip(self.height)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleManifest {
    #[serde(rename = "name")]
    pub sample_name: String,
    #[serde(rename = "tissue")]
    pub tissue_type: String,
    /// Scale percent per scope tag. An empty table means every scope is 100%.
    #[serde(default, rename = "scales")]
    pub scale_percent: BTreeMap<String, f64>,
    pub images: Vec<ImageEntry>,
}

impl SampleManifest {
    pub fn scale_for(&self, scope: &str) -> Result<f64> {
        if self.scale_percent.is_empty() {
            return Ok(100.0);
        }
        self.scale_percent
            .get(scope)
            .copied()
            .ok_or_else(|| DatasetError::UnknownScope {
                sample: self.sample_name.clone(),
                scope: scope.to_string(),
            })
    }

    /// Image entries with `{scope}`/`{scale}` tokens expanded.
    pub fn images_for(&self, scope: &str) -> Result<Vec<ImageEntry>> {
        let scale = self.scale_for(scope)?;
        Ok(self
            .images
            .iter()
            .map(|e| ImageEntry {
                image: expand(&e.image, scope, scale),
                landmarks: expand(&e.landmarks, scope, scale),
                ..e.clone()
            })
            .collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default, rename = "sample")]
    pub samples: Vec<SampleManifest>,
}

/// Loads a TOML manifest. Relative paths are resolved against the manifest's
/// directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
    let mut manifest: Manifest =
        toml::from_str(&text).map_err(|e| DatasetError::InvalidManifest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    let base = path.parent().unwrap_or(Path::new(""));
    for sample in &mut manifest.samples {
        if sample.images.is_empty() {
            return Err(DatasetError::InvalidManifest {
                path: path.to_path_buf(),
                reason: format!("sample {} lists no images", sample.sample_name),
            });
        }
        if let Some((scope, pc)) = sample.scale_percent.iter().find(|(_, &pc)| !(pc > 0.0)) {
            return Err(DatasetError::InvalidManifest {
                path: path.to_path_buf(),
                reason: format!(
                    "sample {}: scale for {scope} must be positive, got {pc}",
                    sample.sample_name
                ),
            });
        }
        for entry in &mut sample.images {
            entry.image = base.join(&entry.image);
            entry.landmarks = base.join(&entry.landmarks);
        }
    }
    Ok(manifest)
}

fn expand(template: &Path, scope: &str, scale: f64) -> PathBuf {
    let raw = template.to_string_lossy();
    if !raw.contains('{') {
        return template.to_path_buf();
    }
    PathBuf::from(
        raw.replace("{scope}", scope)
            .replace("{scale}", &format!("{}", scale.round() as i64)),
    )
}

/// Emits every unordered image pair within each sample once.
///
/// Case ids follow the enumeration order: samples in manifest order, then
/// `(i, j)` with `i < j` lexicographically. Image `i` is the fixed image.
pub fn generate_pairs(manifests: &[SampleManifest], scope: &str) -> Result<Vec<RegistrationCase>> {
    let mut cases = Vec::new();
    for sample in manifests {
        let scale = sample.scale_for(scope)?;
        let images: Vec<(PathBuf, PathBuf, Option<(u32, u32)>)> = sample
            .images_for(scope)?
            .into_iter()
            .map(|e| {
                let size = e.size();
                (e.image, e.landmarks, size)
            })
            .collect();

        let mut seen = HashSet::new();
        for (image, _, _) in &images {
            if !seen.insert(image) {
                return Err(DatasetError::DuplicateImageInSample {
                    sample: sample.sample_name.clone(),
                    image: image.clone(),
                });
            }
        }

        for i in 0..images.len() {
            for j in (i + 1)..images.len() {
                let (fixed_image, fixed_landmarks, fixed_size) = &images[i];
                let (moving_image, moving_landmarks, _) = &images[j];
                cases.push(RegistrationCase {
                    case_id: cases.len(),
                    fixed_image: fixed_image.clone(),
                    moving_image: moving_image.clone(),
                    fixed_landmarks: Some(fixed_landmarks.clone()),
                    moving_landmarks: Some(moving_landmarks.clone()),
                    tissue_type: sample.tissue_type.clone(),
                    sample_name: sample.sample_name.clone(),
                    scope: scope.to_string(),
                    scale_percent: scale,
                    fixed_size: *fixed_size,
                });
            }
        }
    }
    Ok(cases)
}
