//! Load an adapter spec and print the commands it would run for one case,
//! without running anything.
//!
//! ```text
//! cargo run --example adapter_spec -- crates/core/adapters/elastix.toml
//! ```

use std::path::{Path, PathBuf};

use regbench::adapters::{load_adapter_spec, render_command, warped_landmarks_path};
use regbench::dataset::RegistrationCase;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec_path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("adapters/elastix.toml"));
    let spec = load_adapter_spec(&spec_path)?;

    let case = RegistrationCase {
        case_id: 12,
        fixed_image: "/data/lung-lesion_1/HE.jpg".into(),
        moving_image: "/data/lung-lesion_1/CD31.jpg".into(),
        fixed_landmarks: Some("/data/lung-lesion_1/HE.csv".into()),
        moving_landmarks: Some("/data/lung-lesion_1/CD31.csv".into()),
        tissue_type: "lung".into(),
        sample_name: "lung-lesion_1".into(),
        scope: "full".into(),
        scale_percent: 100.0,
        fixed_size: None,
    };
    let ws = Path::new("/experiments/demo/cases/12");
    let cfg = spec.method_config.as_deref();

    println!("method {}", spec.method_name);
    for (label, cmds) in [("prepare", &spec.prepare_commands), ("execute", &spec.execute_commands)] {
        for cmd in cmds.iter() {
            println!("{label}: {}", render_command(cmd, &case, ws, cfg)?.join(" "));
        }
    }
    println!("warped landmarks: {}", warped_landmarks_path(&spec, &case, ws)?.display());
    Ok(())
}
