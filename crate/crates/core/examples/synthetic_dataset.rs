//! Generate a small synthetic dataset with known affine ground truth.
//!
//! ```text
//! cargo run --example synthetic_dataset -- /tmp/synthetic
//! ```

use regbench::synthetic::{generate_dataset, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Some(dir) = std::env::args().nth(1) else {
        eprintln!("usage: synthetic_dataset <output-dir>");
        std::process::exit(1);
    };
    let spec = SyntheticSpec {
        landmarks: 30,
        width: 320,
        height: 240,
        ..SyntheticSpec::uniform(4, 5)
    };
    let data = generate_dataset(&dir, &spec)?;
    for (sample, ts) in data.manifest.samples.iter().zip(&data.transforms) {
        println!("{} ({}): {} images", sample.sample_name, sample.tissue_type, sample.images.len());
        for (img, t) in sample.images.iter().zip(ts) {
            println!("  {:<24} [{:.3} {:.3} {:.3} {:.3} | {:.1} {:.1}]", img.image.display(), t[0], t[1], t[2], t[3], t[4], t[5]);
        }
    }
    println!("manifest: {}", data.manifest_path.display());
    Ok(())
}
