//! Read, scale and write landmark files.
//!
//! ```text
//! cargo run --example landmarks
//! ```

use regbench::dataset::{
    parse_landmark_file, scale_landmarks, truncate_to_common, write_landmark_file, LandmarkSet,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("he.csv");
    // the ImageJ export layout: index column plus X and Y
    std::fs::write(&path, " ,X,Y\n1,1520.5,880\n2,2012,1290.25\n3,640,402\n")?;

    let full = parse_landmark_file(&path)?;
    println!("{} landmarks from {}", full.len(), path.display());

    let quarter = scale_landmarks(&full, 0.25)?;
    for (a, b) in full.iter().zip(quarter.iter()) {
        println!("  ({:>7.2}, {:>7.2}) -> ({:>6.2}, {:>6.2})", a.x, a.y, b.x, b.y);
    }

    let out = dir.path().join("he-25.csv");
    write_landmark_file(&quarter, &out)?;
    assert_eq!(parse_landmark_file(&out)?, quarter);

    let other = LandmarkSet::from_xy(&[(1500.0, 900.0), (2000.0, 1300.0)]);
    let (a, b) = truncate_to_common(&full, &other)?;
    println!("common prefix: {} and {}", a.len(), b.len());
    Ok(())
}
