use std::path::{Path, PathBuf};

use image::{DynamicImage, GrayImage, ImageFormat, ImageReader, RgbImage};

use super::{AdapterError, PreprocessMode, Result};

const TARGET_MEAN: f64 = 128.0;
const TARGET_STD: f64 = 32.0;

/// Prepares an input image for a method.
///
/// `None` returns the path untouched. `Grayscale` writes a luminance copy
/// (0.299 R + 0.587 G + 0.114 B). `ChannelNormalize` maps every channel
/// affinely to mean 128 and standard deviation 32, clipped to [0, 255]; a
/// constant channel is left as is. Copies are written as PNG into `workspace`.
pub fn preprocess_image(path: &Path, mode: PreprocessMode, workspace: &Path) -> Result<PathBuf> {
    if mode == PreprocessMode::None {
        return Ok(path.to_path_buf());
    }
    let reader = ImageReader::open(path)
        .and_then(|r| r.with_guessed_format())
        .map_err(|e| AdapterError::io(path, e))?;
    if !matches!(reader.format(), Some(ImageFormat::Png | ImageFormat::Jpeg)) {
        return Err(AdapterError::UnsupportedFormat(path.to_path_buf()));
    }
    let img = reader.decode().map_err(|source| AdapterError::Image {
        path: path.to_path_buf(),
        source,
    })?;

    let out: DynamicImage = match mode {
        PreprocessMode::None => unreachable!(),
        PreprocessMode::Grayscale => DynamicImage::ImageLuma8(luminance(&img.to_rgb8())),
        PreprocessMode::ChannelNormalize => match img {
            DynamicImage::ImageLuma8(mut g) => {
                normalize_channels(g.as_mut(), 1);
                DynamicImage::ImageLuma8(g)
            }
            other => {
                let mut rgb = other.to_rgb8();
                normalize_channels(rgb.as_mut(), 3);
                DynamicImage::ImageRgb8(rgb)
            }
        },
    };

    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let target = workspace.join(format!("{stem}_{mode}.png"));
    out.save_with_format(&target, ImageFormat::Png)
        .map_err(|source| AdapterError::Image {
            path: target.clone(),
            source,
        })?;
    Ok(target)
}

fn luminance(rgb: &RgbImage) -> GrayImage {
    GrayImage::from_fn(rgb.width(), rgb.height(), |x, y| {
        let [r, g, b] = rgb.get_pixel(x, y).0;
        let l = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
        image::Luma([l.round().clamp(0.0, 255.0) as u8])
    })
}

fn normalize_channels(data: &mut [u8], channels: usize) {
    let pixels = (data.len() / channels) as f64;
    if pixels == 0.0 {
        return;
    }
    for c in 0..channels {
        let values = data.iter().skip(c).step_by(channels);
        let mean = values.clone().map(|&v| v as f64).sum::<f64>() / pixels;
        let var = values.map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / pixels;
        let std = var.sqrt();
        if std == 0.0 {
            continue;
        }
        for v in data.iter_mut().skip(c).step_by(channels) {
            let mapped = TARGET_MEAN + (*v as f64 - mean) / std * TARGET_STD;
            *v = mapped.round().clamp(0.0, 255.0) as u8;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn none_writes_nothing() {
        let ws = tempfile::tempdir().unwrap();
        let src = Path::new("/does/not/matter.tif");
        assert_eq!(preprocess_image(src, PreprocessMode::None, ws.path()).unwrap(), src);
        assert_eq!(fs::read_dir(ws.path()).unwrap().count(), 0);
    }

    #[test]
    fn two_pixel_normalization() {
        let ws = tempfile::tempdir().unwrap();
        let src = ws.path().join("two.png");
        GrayImage::from_raw(2, 1, vec![0, 255]).unwrap().save(&src).unwrap();
        let out = preprocess_image(&src, PreprocessMode::ChannelNormalize, ws.path()).unwrap();
        let img = image::open(out).unwrap().to_luma8();
        assert_eq!(img.as_raw(), &vec![96, 160]);
    }

    #[test]
    fn uniform_image_unchanged() {
        let ws = tempfile::tempdir().unwrap();
        let src = ws.path().join("gray.png");
        RgbImage::from_pixel(4, 3, image::Rgb([128, 128, 128])).save(&src).unwrap();
        let out = preprocess_image(&src, PreprocessMode::ChannelNormalize, ws.path()).unwrap();
        assert_ne!(out, src);
        let img = image::open(out).unwrap().to_rgb8();
        assert!(img.pixels().all(|p| p.0 == [128, 128, 128]));
    }

    #[test]
    fn rgb_channels_normalized_independently() {
        let ws = tempfile::tempdir().unwrap();
        let src = ws.path().join("rgb.png");
        let img = RgbImage::from_raw(2, 1, vec![0, 10, 7, 255, 10, 9]).unwrap();
        img.save(&src).unwrap();
        let out = preprocess_image(&src, PreprocessMode::ChannelNormalize, ws.path()).unwrap();
        let img = image::open(out).unwrap().to_rgb8();
        // red spans the range, green is constant, blue has mean 8 std 1
        assert_eq!(img.as_raw(), &vec![96, 10, 96, 160, 10, 160]);
    }

    #[test]
    fn grayscale_weights() {
        let ws = tempfile::tempdir().unwrap();
        let src = ws.path().join("c.png");
        RgbImage::from_raw(3, 1, vec![255, 0, 0, 0, 255, 0, 0, 0, 255])
            .unwrap()
            .save(&src)
            .unwrap();
        let out = preprocess_image(&src, PreprocessMode::Grayscale, ws.path()).unwrap();
        let img = image::open(&out).unwrap();
        assert!(matches!(img, DynamicImage::ImageLuma8(_)));
        assert_eq!(img.to_luma8().as_raw(), &vec![76, 150, 29]);
    }

    #[test]
    fn unsupported_format() {
        let ws = tempfile::tempdir().unwrap();
        let src = ws.path().join("x.txt");
        fs::write(&src, "hello").unwrap();
        assert!(matches!(
            preprocess_image(&src, PreprocessMode::Grayscale, ws.path()),
            Err(AdapterError::UnsupportedFormat(_))
        ));
    }
}
