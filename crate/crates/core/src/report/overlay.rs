use super::svg::Svg;
use super::{ReportError, Result};
use crate::dataset::{ImageGeometry, LandmarkSet, RegistrationCase};

/// Line groups of an overlay: `(id, colour, from, to)` where the endpoints
/// select among moving (0), warped (1) and fixed (2).
const ROLES: [(&str, &str, usize, usize); 3] = [
    ("true-mapping", "green", 0, 2),
    ("estimated-mapping", "blue", 0, 1),
    ("tre", "red", 1, 2),
];

/// Draws the landmark displacements of one case in the fixed image frame.
///
/// Green segments join moving to fixed landmarks, blue ones moving to
/// warped, red ones warped to fixed. The sets must share one length.
pub fn render_case_overlay(
    case: &RegistrationCase,
    fixed: &LandmarkSet,
    moving: &LandmarkSet,
    warped: &LandmarkSet,
    geometry: &ImageGeometry,
) -> Result<String> {
    if fixed.is_empty() || moving.is_empty() || warped.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    if fixed.len() != moving.len() || fixed.len() != warped.len() {
        return Err(ReportError::LengthMismatch(fixed.len(), moving.len(), warped.len()));
    }
    let (w, h) = (geometry.width() as f64, geometry.height() as f64);
    // strokes stay visible regardless of the image resolution
    let stroke = (geometry.diagonal() / 800.0).max(0.5);
    let sets = [moving, warped, fixed];

    let mut svg = Svg::new(w, h);
    svg.raw(&format!(
        "<title>case {}: {} onto {}</title>",
        case.case_id,
        super::svg::escape(&case.moving_image.display().to_string()),
        super::svg::escape(&case.fixed_image.display().to_string()),
    ));
    svg.rect(0.0, 0.0, w, h, " fill=\"white\" stroke=\"black\"");
    for (id, colour, from, to) in ROLES {
        svg.open_group(&[
            ("id", id.into()),
            ("stroke", colour.into()),
            ("stroke-width", super::svg::num(stroke)),
        ]);
        for (a, b) in sets[from].iter().zip(sets[to].iter()) {
            svg.line(a.x, a.y, b.x, b.y, "");
        }
        svg.close_group();
    }
    svg.open_group(&[("id", "landmarks".into()), ("stroke", "none".into())]);
    for (name, set, colour) in [("fixed", fixed, "green"), ("moving", moving, "orange"), ("warped", warped, "blue")] {
        svg.open_group(&[("class", name.into()), ("fill", colour.into())]);
        for p in set {
            svg.circle(p.x, p.y, stroke * 2.0, "");
        }
        svg.close_group();
    }
    svg.close_group();
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case() -> RegistrationCase {
        RegistrationCase {
            case_id: 3,
            fixed_image: "/f.png".into(),
            moving_image: "/m.png".into(),
            fixed_landmarks: None,
            moving_landmarks: None,
            tissue_type: String::new(),
            sample_name: String::new(),
            scope: String::new(),
            scale_percent: 100.0,
            fixed_size: None,
        }
    }

    fn lines_by_group(svg: &str) -> Vec<(String, String, Vec<f64>)> {
        let doc = roxmltree::Document::parse(svg).unwrap();
        doc.descendants()
            .filter(|n| n.has_tag_name("g") && n.attribute("stroke").is_some_and(|s| s != "none"))
            .map(|g| {
                let lengths = g
                    .children()
                    .filter(|c| c.has_tag_name("line"))
                    .map(|l| {
                        let f = |a| l.attribute(a).unwrap().parse::<f64>().unwrap();
                        (f("x2") - f("x1")).hypot(f("y2") - f("y1"))
                    })
                    .collect();
                (
                    g.attribute("id").unwrap().to_string(),
                    g.attribute("stroke").unwrap().to_string(),
                    lengths,
                )
            })
            .collect()
    }

    #[test]
    fn three_segments_per_landmark() {
        let fixed = LandmarkSet::from_xy(&[(10.0, 10.0), (20.0, 30.0), (5.0, 40.0)]);
        let moving = LandmarkSet::from_xy(&[(12.0, 15.0), (25.0, 31.0), (9.0, 44.0)]);
        let warped = LandmarkSet::from_xy(&[(11.0, 11.0), (21.0, 30.0), (6.0, 41.0)]);
        let geom = ImageGeometry::new(50, 60).unwrap();
        let svg = render_case_overlay(&case(), &fixed, &moving, &warped, &geom).unwrap();
        let groups = lines_by_group(&svg);
        let roles: Vec<_> = groups.iter().map(|(id, c, _)| (id.as_str(), c.as_str())).collect();
        assert_eq!(
            roles,
            vec![("true-mapping", "green"), ("estimated-mapping", "blue"), ("tre", "red")]
        );
        assert!(groups.iter().all(|(_, _, l)| l.len() == 3));
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.has_tag_name("line")).count(), 9);
        assert_eq!(doc.root_element().attribute("width"), Some("50"));
        assert_eq!(doc.root_element().attribute("height"), Some("60"));
    }

    #[test]
    fn identity_warp_has_zero_red_segments() {
        let fixed = LandmarkSet::from_xy(&[(1.0, 2.0), (3.0, 4.0)]);
        let moving = LandmarkSet::from_xy(&[(2.0, 2.0), (5.0, 4.0)]);
        let geom = ImageGeometry::new(10, 10).unwrap();
        let svg = render_case_overlay(&case(), &fixed, &moving, &fixed, &geom).unwrap();
        let groups = lines_by_group(&svg);
        assert!(groups[2].2.iter().all(|l| *l == 0.0));
        assert!(groups[0].2.iter().all(|l| *l > 0.0));
    }

    #[test]
    fn rejects_empty_and_mismatched() {
        let geom = ImageGeometry::new(10, 10).unwrap();
        let a = LandmarkSet::from_xy(&[(1.0, 1.0)]);
        let b = LandmarkSet::from_xy(&[(1.0, 1.0), (2.0, 2.0)]);
        assert!(matches!(
            render_case_overlay(&case(), &LandmarkSet::default(), &a, &a, &geom),
            Err(ReportError::EmptyInput)
        ));
        assert!(matches!(
            render_case_overlay(&case(), &a, &b, &a, &geom),
            Err(ReportError::LengthMismatch(1, 2, 1))
        ));
    }
}
