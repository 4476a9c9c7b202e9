//! Expand a dataset manifest into registration pairs and round-trip them
//! through a pairing table.
//!
//! ```text
//! cargo run --example pairing
//! ```

use std::collections::BTreeMap;

use regbench::dataset::{generate_pairs, load_manifest, load_pairing_table, write_pairing_table};
use regbench::synthetic::{generate_dataset, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    // eight samples of five stains and one of eight
    let data = generate_dataset(dir.path(), &SyntheticSpec::nine_sample_layout())?;
    let manifest = load_manifest(&data.manifest_path)?;
    let cases = generate_pairs(&manifest.samples, "full")?;

    let mut per_sample: BTreeMap<&str, usize> = BTreeMap::new();
    for c in &cases {
        *per_sample.entry(&c.sample_name).or_default() += 1;
    }
    for (sample, n) in &per_sample {
        println!("{sample}: {n} pairs");
    }
    println!("total {}", cases.len());

    let table = dir.path().join("pairs.csv");
    write_pairing_table(&cases, &table)?;
    let back = load_pairing_table(&table, true)?;
    assert_eq!(back.len(), cases.len());
    println!("first: {} -> {}", back[0].moving_image.display(), back[0].fixed_image.display());
    Ok(())
}
