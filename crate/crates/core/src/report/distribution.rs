use super::svg::{color, scale, Svg};
use super::{group_by, metric_values, LabeledMetrics, Metric, ReportError, Result};

/// Step points `(x, F(x))` of the empirical CDF, one per distinct value.
pub fn empirical_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, x) in v.iter().enumerate() {
        let f = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *x => last.1 = f,
            _ => out.push((*x, f)),
        }
    }
    out
}

const W: f64 = 560.0;
const H: f64 = 320.0;
const M: f64 = 50.0;

/// Overlays the ECDF of `metric` for two scopes, one colour per method and
/// a solid/dashed line per scope.
pub fn render_scope_comparison(
    records: &[LabeledMetrics],
    metric: Metric,
    scope_a: &str,
    scope_b: &str,
) -> Result<String> {
    for scope in [scope_a, scope_b] {
        if !records.iter().any(|r| r.scope == scope) {
            return Err(ReportError::MissingScope(scope.to_string()));
        }
    }
    let groups = group_by(records, |r| r.method.clone());
    let mut curves = Vec::new();
    for (mi, (method, members)) in groups.iter().enumerate() {
        for (si, scope) in [scope_a, scope_b].into_iter().enumerate() {
            let in_scope: Vec<&LabeledMetrics> =
                members.iter().copied().filter(|r| r.scope == scope).collect();
            let cdf = empirical_cdf(&metric_values(&in_scope, metric));
            if !cdf.is_empty() {
                curves.push((mi, si, method.clone(), scope, cdf));
            }
        }
    }
    let xs = curves.iter().flat_map(|c| c.4.iter().map(|p| p.0));
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let px = |x: f64| scale(x, lo, hi, M, W - M);
    let py = |f: f64| scale(f, 0.0, 1.0, H - M, M);

    let mut svg = Svg::new(W + 180.0, H);
    svg.text(W / 2.0, M / 2.0, &format!("{} ({scope_a} vs {scope_b})", metric.axis_label()), " text-anchor=\"middle\"");
    svg.line(M, H - M, W - M, H - M, " stroke=\"black\"");
    svg.line(M, M, M, H - M, " stroke=\"black\"");
    svg.text(M, H - M + 16.0, &format!("{lo:.3}"), " text-anchor=\"middle\" font-size=\"10\"");
    svg.text(W - M, H - M + 16.0, &format!("{hi:.3}"), " text-anchor=\"middle\" font-size=\"10\"");

    for (row, (mi, si, method, scope, cdf)) in curves.iter().enumerate() {
        // horizontal-then-vertical steps starting from F = 0
        let mut pts = vec![(px(cdf[0].0), py(0.0))];
        let mut prev = 0.0;
        for (x, f) in cdf {
            pts.push((px(*x), py(prev)));
            pts.push((px(*x), py(*f)));
            prev = *f;
        }
        pts.push((W - M, py(prev)));
        let data = cdf.iter().map(|(x, f)| format!("{x}:{f}")).collect::<Vec<_>>().join(" ");
        let dash = if *si == 1 { " stroke-dasharray=\"6 4\"" } else { "" };
        svg.raw(&format!(
            "<polyline class=\"ecdf\" data-method=\"{}\" data-scope=\"{}\" data-cdf=\"{data}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{dash}/>",
            super::svg::escape(method),
            super::svg::escape(scope),
            Svg::points_attr(&pts),
            color(*mi),
        ));
        let ly = M + 18.0 * row as f64;
        svg.line(W, ly, W + 24.0, ly, &format!(" stroke=\"{}\" stroke-width=\"2\"{dash}", color(*mi)));
        svg.text(W + 30.0, ly + 4.0, &format!("{method} {scope}"), " font-size=\"11\"");
    }
    Ok(svg.finish())
}
