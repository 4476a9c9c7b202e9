//! Render the summary table and every chart from hand-made per-case
//! records of three methods.
//!
//! ```text
//! cargo run --example report_charts -- /tmp/charts
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regbench::metrics::{CaseMetrics, CaseStatus};
use regbench::report::{ChartKind, LabeledMetrics, Metric};
use regbench::runner::{summarize, write_report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "charts".into());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tissues = ["lung", "kidney", "breast", "gastric"];
    let mut records = Vec::new();
    for (method, skill, minutes) in [("bUnwarpJ", 0.4, 2.0), ("DROP", 0.7, 0.5), ("elastix", 0.85, 1.0)] {
        for scope in ["5k", "10k"] {
            for id in 0..40 {
                let initial: f64 = rng.random_range(0.02..0.12);
                let fin = initial * (1.0 - skill) * rng.random_range(0.3..1.7);
                records.push(LabeledMetrics {
                    method: method.into(),
                    scope: scope.into(),
                    tissue: tissues[id % tissues.len()].into(),
                    metrics: CaseMetrics {
                        case_id: id,
                        status: CaseStatus::Completed,
                        initial_median_rtre: initial,
                        initial_max_rtre: initial * 2.0,
                        final_median_rtre: fin,
                        final_max_rtre: fin * 2.5,
                        robustness: (skill + rng.random_range(-0.2..0.2f64)).clamp(0.0, 1.0),
                        landmark_count_used: 70,
                        wall_time_s: minutes * 60.0,
                        normalized_time_s: minutes * 60.0 * rng.random_range(0.8..1.2),
                    },
                });
            }
        }
    }

    for s in summarize(&records)? {
        println!("{:<9} {:>4}: AMrTRE {:.3}%", s.method, s.scope, s.avg_median_rtre * 100.0);
    }
    let kinds = [ChartKind::Radar, ChartKind::Boxplot, ChartKind::Distribution, ChartKind::TissueBars];
    for path in write_report(&records, std::path::Path::new(&out), &kinds, &[Metric::MrTre, Metric::Robustness])? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
