use std::f64::consts::PI;

use super::svg::{color, Svg};
use super::{ReportError, Result};
use crate::metrics::DatasetSummary;

/// Radar chart axes; every one is "smaller is better".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadarAxis {
    AMrTre,
    MMrTre,
    ASrTre,
    /// 1 − mean robustness
    Weakness,
    Time,
}

impl RadarAxis {
    pub const ALL: [RadarAxis; 5] = [
        RadarAxis::AMrTre,
        RadarAxis::MMrTre,
        RadarAxis::ASrTre,
        RadarAxis::Weakness,
        RadarAxis::Time,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RadarAxis::AMrTre => "AMrTRE",
            RadarAxis::MMrTre => "MMrTRE",
            RadarAxis::ASrTre => "ASrTRE",
            RadarAxis::Weakness => "weakness",
            RadarAxis::Time => "time",
        }
    }
}

pub fn radar_value(s: &DatasetSummary, axis: RadarAxis) -> f64 {
    match axis {
        RadarAxis::AMrTre => s.avg_median_rtre,
        RadarAxis::MMrTre => s.median_median_rtre,
        RadarAxis::ASrTre => s.avg_max_rtre,
        RadarAxis::Weakness => 1.0 - s.avg_robustness,
        RadarAxis::Time => s.avg_time_min,
    }
}

fn check_axes(axes: &[RadarAxis]) -> Result<()> {
    let n = RadarAxis::ALL.iter().filter(|a| axes.contains(a)).count();
    if n < 3 || n != axes.len() {
        return Err(ReportError::FewerThanThreeAxes(n));
    }
    Ok(())
}

/// Per-method values scaled to `[0, 1]` along each axis.
///
/// With several methods each axis is min-max scaled across them; a single
/// method is scaled against `[0, its value]`. A constant axis maps to 0.
pub fn radar_scaled(summaries: &[DatasetSummary], axes: &[RadarAxis]) -> Result<Vec<Vec<f64>>> {
    check_axes(axes)?;
    if summaries.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let mut out = vec![Vec::with_capacity(axes.len()); summaries.len()];
    for &axis in axes {
        let raw: Vec<f64> = summaries.iter().map(|s| radar_value(s, axis)).collect();
        let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = if raw.len() == 1 {
            0.0
        } else {
            raw.iter().copied().fold(f64::INFINITY, f64::min)
        };
        for (row, v) in out.iter_mut().zip(&raw) {
            row.push(if hi > lo { (v - lo) / (hi - lo) } else { 0.0 });
        }
    }
    Ok(out)
}

const R: f64 = 150.0;
const C: f64 = 220.0;

fn vertex(k: usize, n: usize, s: f64) -> (f64, f64) {
    let angle = -PI / 2.0 + 2.0 * PI * k as f64 / n as f64;
    let r = R * (0.1 + 0.9 * s);
    (C + r * angle.cos(), C + r * angle.sin())
}

/// One closed polygon per method; closer to the centre is better.
pub fn render_radar(summaries: &[DatasetSummary], axes: &[RadarAxis]) -> Result<String> {
    let scaled = radar_scaled(summaries, axes)?;
    let n = axes.len();
    let mut svg = Svg::new(2.0 * C + 160.0, 2.0 * C);

    svg.open_group(&[("class", "axes".into()), ("stroke", "#999".into())]);
    for (k, axis) in axes.iter().enumerate() {
        let (x, y) = vertex(k, n, 1.0);
        svg.line(C, C, x, y, "");
        let (lx, ly) = vertex(k, n, 1.12);
        svg.text(lx, ly, axis.label(), " text-anchor=\"middle\" stroke=\"none\"");
    }
    let ring: Vec<_> = (0..n).map(|k| vertex(k, n, 1.0)).collect();
    svg.raw(&format!("<polygon points=\"{}\" fill=\"none\"/>", Svg::points_attr(&ring)));
    svg.close_group();

    for (i, (summary, values)) in summaries.iter().zip(&scaled).enumerate() {
        let pts: Vec<_> = values.iter().enumerate().map(|(k, s)| vertex(k, n, *s)).collect();
        let label = format!("{} ({})", summary.method, summary.scope);
        let data = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        svg.raw(&format!(
            "<polygon class=\"method\" data-method=\"{}\" data-values=\"{data}\" points=\"{}\" fill=\"{c}\" fill-opacity=\"0.15\" stroke=\"{c}\" stroke-width=\"2\"/>",
            super::svg::escape(&label),
            Svg::points_attr(&pts),
            c = color(i),
        ));
        svg.rect(2.0 * C + 10.0, 20.0 + 20.0 * i as f64, 12.0, 12.0, &format!(" fill=\"{}\"", color(i)));
        svg.text(2.0 * C + 28.0, 30.0 + 20.0 * i as f64, &label, "");
    }
    Ok(svg.finish())
}
