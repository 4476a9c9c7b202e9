use super::svg::{color, scale, Svg};
use super::{group_by, metric_values, LabeledMetrics, Metric, ReportError, Result};
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub struct TissueBar {
    pub tissue: String,
    pub method: String,
    pub mean: f64,
    pub count: usize,
}

/// Mean of `metric` per (tissue, method), tissues and methods in order of
/// first appearance. Combinations without values are omitted.
pub fn tissue_means(records: &[LabeledMetrics], metric: Metric) -> Vec<TissueBar> {
    let methods: Vec<String> = group_by(records, |r| r.method.clone())
        .into_iter()
        .map(|(m, _)| m)
        .collect();
    let mut bars = Vec::new();
    for (tissue, members) in group_by(records, |r| r.tissue.clone()) {
        for method in &methods {
            let of_method: Vec<&LabeledMetrics> =
                members.iter().copied().filter(|r| &r.method == method).collect();
            let values = metric_values(&of_method, metric);
            if let Some(mean) = stats::mean(&values) {
                bars.push(TissueBar {
                    tissue: tissue.clone(),
                    method: method.clone(),
                    mean,
                    count: values.len(),
                });
            }
        }
    }
    bars
}

const BAR: f64 = 24.0;
const GAP: f64 = 30.0;
const H: f64 = 300.0;
const M: f64 = 50.0;

/// Grouped bars: one group per tissue, one bar per method.
pub fn render_tissue_breakdown(records: &[LabeledMetrics], metric: Metric) -> Result<String> {
    let bars = tissue_means(records, metric);
    if bars.is_empty() {
        return Err(ReportError::EmptyGroup(format!("no {metric} values")));
    }
    let methods: Vec<String> = group_by(records, |r| r.method.clone())
        .into_iter()
        .map(|(m, _)| m)
        .collect();
    let groups = group_by(&bars, |b| b.tissue.clone());
    let hi = bars.iter().map(|b| b.mean).fold(0.0, f64::max);
    let lo = bars.iter().map(|b| b.mean).fold(0.0, f64::min);
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let y = |v: f64| scale(v, lo, hi, H - M, M);

    let group_w = methods.len() as f64 * BAR;
    let width = 2.0 * M + groups.len() as f64 * (group_w + GAP) + 140.0;
    let mut svg = Svg::new(width, H);
    svg.text(width / 2.0, M / 2.0, metric.axis_label(), " text-anchor=\"middle\"");
    svg.line(M, y(0.0), width - 140.0 - M, y(0.0), " stroke=\"black\"");

    for (gi, (tissue, members)) in groups.iter().enumerate() {
        let x0 = M + GAP / 2.0 + gi as f64 * (group_w + GAP);
        svg.open_group(&[("class", "tissue".into()), ("data-tissue", tissue.clone())]);
        for bar in members {
            let mi = methods.iter().position(|m| *m == bar.method).unwrap_or(0);
            let x = x0 + mi as f64 * BAR;
            let (top, bottom) = (y(bar.mean.max(0.0)), y(bar.mean.min(0.0)));
            svg.rect(
                x,
                top,
                BAR - 2.0,
                bottom - top,
                &format!(
                    " class=\"bar\" data-method=\"{}\" data-value=\"{}\" fill=\"{}\"",
                    super::svg::escape(&bar.method),
                    bar.mean,
                    color(mi)
                ),
            );
        }
        svg.text(x0 + group_w / 2.0, H - M + 16.0, tissue, " text-anchor=\"middle\" font-size=\"11\"");
        svg.close_group();
    }
    for (mi, method) in methods.iter().enumerate() {
        let lx = width - 130.0;
        svg.rect(lx, M + 18.0 * mi as f64, 12.0, 12.0, &format!(" fill=\"{}\"", color(mi)));
        svg.text(lx + 18.0, M + 10.0 + 18.0 * mi as f64, method, " font-size=\"11\"");
    }
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::record;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_tissues_two_methods() {
        let mut recs = Vec::new();
        for t in ["lung", "kidney", "liver"] {
            for m in ["a", "b"] {
                recs.push(record(m, "10k", t, 0, 0.2));
            }
        }
        let svg = render_tissue_breakdown(&recs, Metric::MrTre).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let groups: Vec<_> = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("tissue"))
            .collect();
        assert_eq!(groups.len(), 3);
        for g in groups {
            assert_eq!(g.children().filter(|c| c.attribute("class") == Some("bar")).count(), 2);
        }
    }

    #[test]
    fn single_record_bar_is_its_value() {
        let recs = vec![record("a", "s", "lung", 0, 0.037)];
        let bars = tissue_means(&recs, Metric::MrTre);
        assert_eq!(bars.len(), 1);
        assert_eq!(bars[0].mean, 0.037);
        let svg = render_tissue_breakdown(&recs, Metric::MrTre).unwrap();
        assert!(svg.contains("data-value=\"0.037\""));
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(
            render_tissue_breakdown(&[], Metric::Time),
            Err(ReportError::EmptyGroup(_))
        ));
    }

    proptest! {
        #[test]
        fn means_match_brute_force(rows in prop::collection::vec((0usize..3, 0usize..2, 0.0..1.0f64), 1..40)) {
            let recs: Vec<_> = rows.iter().enumerate()
                .map(|(i, (t, m, v))| record(&format!("m{m}"), "s", &format!("t{t}"), i, *v))
                .collect();
            for bar in tissue_means(&recs, Metric::MrTre) {
                let mut sum = 0.0;
                let mut n = 0;
                for r in &recs {
                    if r.tissue == bar.tissue && r.method == bar.method {
                        sum += r.metrics.final_median_rtre;
                        n += 1;
                    }
                }
                prop_assert_eq!(n, bar.count);
                prop_assert!((bar.mean - sum / n as f64).abs() < 1e-12);
            }
        }
    }
}
