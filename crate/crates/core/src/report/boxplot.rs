use super::svg::{color, scale, Svg};
use super::{group_by, metric_values, LabeledMetrics, Metric, ReportError, Result};
use crate::stats;

/// Five-number summary; quartiles interpolate linearly between order
/// statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    Some(BoxStats {
        min: stats::min(values)?,
        q1: stats::quantile(values, 0.25)?,
        median: stats::median(values)?,
        q3: stats::quantile(values, 0.75)?,
        max: stats::max(values)?,
    })
}

/// Methods sorted by increasing mean MrTRE (AMrTRE); ties keep first
/// appearance.
pub fn method_order(records: &[LabeledMetrics]) -> Vec<String> {
    let mut groups: Vec<(String, f64)> = group_by(records, |r| r.method.clone())
        .into_iter()
        .map(|(m, rs)| {
            let amrtre = stats::mean(&metric_values(&rs, Metric::MrTre)).unwrap_or(f64::INFINITY);
            (m, amrtre)
        })
        .collect();
    groups.sort_by(|a, b| a.1.total_cmp(&b.1));
    groups.into_iter().map(|(m, _)| m).collect()
}

const W_BOX: f64 = 80.0;
const MARGIN: f64 = 60.0;
const PLOT_H: f64 = 300.0;

/// One box per method for `metric`, left to right by increasing AMrTRE.
pub fn render_boxplots(records: &[LabeledMetrics], metric: Metric) -> Result<String> {
    if records.is_empty() {
        return Err(ReportError::EmptyGroup("no records".into()));
    }
    let groups = group_by(records, |r| r.method.clone());
    let mut boxes = Vec::new();
    for method in method_order(records) {
        let members = &groups.iter().find(|(m, _)| *m == method).expect("grouped").1;
        let stats = box_stats(&metric_values(members, metric))
            .ok_or_else(|| ReportError::EmptyGroup(format!("{method}/{metric}")))?;
        boxes.push((method, stats));
    }

    let lo = boxes.iter().map(|(_, b)| b.min).fold(f64::INFINITY, f64::min).min(0.0);
    let mut hi = boxes.iter().map(|(_, b)| b.max).fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let width = 2.0 * MARGIN + boxes.len() as f64 * (W_BOX * 1.5);
    let height = PLOT_H + 2.0 * MARGIN;
    let y = |v: f64| scale(v, lo, hi, MARGIN + PLOT_H, MARGIN);

    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, MARGIN / 2.0, metric.axis_label(), " text-anchor=\"middle\"");
    svg.line(MARGIN, MARGIN, MARGIN, MARGIN + PLOT_H, " stroke=\"black\"");
    for tick in [lo, (lo + hi) / 2.0, hi] {
        svg.text(MARGIN - 6.0, y(tick) + 4.0, &format!("{tick:.3}"), " text-anchor=\"end\" font-size=\"10\"");
    }
    for (i, (method, b)) in boxes.iter().enumerate() {
        let cx = MARGIN + W_BOX * 0.75 + i as f64 * W_BOX * 1.5;
        let left = cx - W_BOX / 2.0;
        svg.open_group(&[
            ("class", "box".into()),
            ("data-method", method.clone()),
            ("data-min", b.min.to_string()),
            ("data-q1", b.q1.to_string()),
            ("data-median", b.median.to_string()),
            ("data-q3", b.q3.to_string()),
            ("data-max", b.max.to_string()),
            ("stroke", "black".into()),
        ]);
        svg.line(cx, y(b.min), cx, y(b.q1), "");
        svg.line(cx, y(b.q3), cx, y(b.max), "");
        svg.line(left + W_BOX * 0.25, y(b.min), left + W_BOX * 0.75, y(b.min), "");
        svg.line(left + W_BOX * 0.25, y(b.max), left + W_BOX * 0.75, y(b.max), "");
        svg.rect(left, y(b.q3), W_BOX, y(b.q1) - y(b.q3), &format!(" fill=\"{}\" fill-opacity=\"0.5\"", color(i)));
        svg.line(left, y(b.median), left + W_BOX, y(b.median), " stroke-width=\"2\"");
        svg.text(cx, MARGIN + PLOT_H + 18.0, method, " text-anchor=\"middle\"");
        svg.close_group();
    }
    Ok(svg.finish())
}
