//! Generated datasets with known ground truth, for tests, examples and
//! dry runs of a new adapter.
//!
//! Every image of a sample is an affine copy of one base landmark layout,
//! so the exact mapping between any two images is known.

use std::fs;
use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{
    write_landmark_file, DatasetError, ImageEntry, LandmarkSet, Manifest, Point, SampleManifest,
};

const TISSUES: [&str; 6] = ["lung", "kidney", "breast", "liver", "gastric", "colon"];
const STAINS: [&str; 8] = ["HE", "CD31", "CD68", "Ki67", "ER", "PR", "HER2", "CC10"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// Image count of each sample.
    pub images: Vec<usize>,
    pub landmarks: usize,
    pub width: u32,
    pub height: u32,
    pub seed: u64,
    /// Record image sizes in the manifest instead of relying on headers.
    pub write_sizes: bool,
}

impl SyntheticSpec {
    pub fn uniform(samples: usize, images: usize) -> Self {
        SyntheticSpec {
            images: vec![images; samples],
            ..Default::default()
        }
    }

    /// Eight samples of five images and one of eight.
    pub fn nine_sample_layout() -> Self {
        let mut images = vec![5; 8];
        images.push(8);
        SyntheticSpec {
            images,
            ..Default::default()
        }
    }
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            images: vec![4; 3],
            landmarks: 20,
            width: 96,
            height: 72,
            seed: 7,
            write_sizes: false,
        }
    }
}

/// `[a11, a12, a21, a22, tx, ty]`
pub type Affine = [f64; 6];

pub fn apply(t: &Affine, p: Point) -> Point {
    Point::new(t[0] * p.x + t[1] * p.y + t[4], t[2] * p.x + t[3] * p.y + t[5])
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub manifest_path: PathBuf,
    pub manifest: Manifest,
    /// Transform from each sample's base layout to each image.
    pub transforms: Vec<Vec<Affine>>,
}

fn random_affine(rng: &mut ChaCha8Rng, w: f64, h: f64) -> Affine {
    let angle = rng.random_range(-0.08..0.08f64);
    let scale = rng.random_range(0.95..1.05f64);
    let (s, c) = angle.sin_cos();
    let (a11, a12, a21, a22) = (scale * c, -scale * s, scale * s, scale * c);
    let (cx, cy) = (w / 2.0, h / 2.0);
    // rotate about the centre, then shift a little
    let tx = cx - (a11 * cx + a12 * cy) + rng.random_range(-0.04..0.04) * w;
    let ty = cy - (a21 * cx + a22 * cy) + rng.random_range(-0.04..0.04) * h;
    [a11, a12, a21, a22, tx, ty]
}

fn render(set: &LandmarkSet, w: u32, h: u32, tint: u8) -> RgbImage {
    let mut img = RgbImage::from_fn(w, h, |x, y| {
        let g = (200 + (x + y) % 40) as u8;
        Rgb([g, g.saturating_sub(tint / 4), g])
    });
    for p in set {
        let (px, py) = (p.x.round() as i64, p.y.round() as i64);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (x, y) = (px + dx, py + dy);
                if x >= 0 && y >= 0 && (x as u32) < w && (y as u32) < h {
                    img.put_pixel(x as u32, y as u32, Rgb([120, 20, tint]));
                }
            }
        }
    }
    img
}

/// Writes images, landmark files and `manifest.toml` under `dir`.
pub fn generate_dataset(dir: impl AsRef<Path>, spec: &SyntheticSpec) -> Result<SyntheticDataset, DatasetError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| DatasetError::io(dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (w, h) = (spec.width as f64, spec.height as f64);
    let mut manifest = Manifest::default();
    let mut transforms = Vec::new();

    for (si, &count) in spec.images.iter().enumerate() {
        let name = format!("sample-{si:02}");
        let sample_dir = dir.join(&name);
        fs::create_dir_all(&sample_dir).map_err(|e| DatasetError::io(&sample_dir, e))?;
        let base: Vec<Point> = (0..spec.landmarks)
            .map(|_| Point::new(rng.random_range(0.25..0.75) * w, rng.random_range(0.25..0.75) * h))
            .collect();
        let mut entries = Vec::new();
        let mut sample_transforms = Vec::new();
        for k in 0..count {
            let t = if k == 0 {
                [1.0, 0.0, 0.0, 1.0, 0.0, 0.0]
            } else {
                random_affine(&mut rng, w, h)
            };
            let set = LandmarkSet::new(base.iter().map(|p| apply(&t, *p)).collect());
            let stain = STAINS[k % STAINS.len()];
            let image = format!("{name}/{stain}-{k}.png");
            let landmarks = format!("{name}/{stain}-{k}.csv");
            write_landmark_file(&set, dir.join(&landmarks))?;
            let img_path = dir.join(&image);
            render(&set, spec.width, spec.height, (k * 40 % 255) as u8)
                .save(&img_path)
                .map_err(|e| DatasetError::io(&img_path, std::io::Error::other(e)))?;
            entries.push(ImageEntry {
                image: image.into(),
                landmarks: landmarks.into(),
                stain: stain.into(),
                width: spec.write_sizes.then_some(spec.width),
                height: spec.write_sizes.then_some(spec.height),
            });
            sample_transforms.push(t);
        }
        manifest.samples.push(SampleManifest {
            sample_name: name,
            tissue_type: TISSUES[si % TISSUES.len()].into(),
            scale_percent: Default::default(),
            images: entries,
        });
        transforms.push(sample_transforms);
    }

    let manifest_path = dir.join("manifest.toml");
    let text = toml::to_string(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, text).map_err(|e| DatasetError::io(&manifest_path, e))?;
    Ok(SyntheticDataset {
        manifest_path,
        manifest,
        transforms,
    })
}
