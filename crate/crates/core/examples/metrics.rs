//! Case statistics and the dataset aggregate for a few hand-made cases.
//!
//! ```text
//! cargo run --example metrics
//! ```

use regbench::dataset::LandmarkSet;
use regbench::metrics::{
    case_statistics, dataset_aggregate, substitute_failure, CaseStatus, CaseTiming,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let diagonal = 1000.0;
    let fixed = LandmarkSet::from_xy(&[(100.0, 100.0), (400.0, 250.0), (700.0, 600.0)]);
    let moving = LandmarkSet::from_xy(&[(130.0, 90.0), (440.0, 270.0), (690.0, 660.0)]);
    let good = LandmarkSet::from_xy(&[(102.0, 101.0), (401.0, 248.0), (705.0, 606.0)]);

    let timing = CaseTiming {
        wall_time_s: 90.0,
        normalized_time_s: 90.0,
    };
    let ok = case_statistics(0, CaseStatus::Completed, &fixed, &moving, &good, diagonal, timing)?;
    // a failed run is scored as if the moving image had not moved
    let fallback = substitute_failure(CaseStatus::Failed, &moving)?;
    let failed = case_statistics(1, CaseStatus::Failed, &fixed, &moving, &fallback, diagonal, timing)?;

    for m in [&ok, &failed] {
        println!(
            "case {} {}: MrTRE {:.4} SrTRE {:.4} robustness {:.2}",
            m.case_id, m.status, m.final_median_rtre, m.final_max_rtre, m.robustness
        );
    }
    let s = dataset_aggregate(&[ok, failed], "demo", "full")?;
    println!(
        "AMrTRE {:.4}  MMrTRE {:.4}  ASrTRE {:.4}  robustness {:.2}  time {:.1} min",
        s.avg_median_rtre, s.median_median_rtre, s.avg_max_rtre, s.avg_robustness, s.avg_time_min
    );
    Ok(())
}
