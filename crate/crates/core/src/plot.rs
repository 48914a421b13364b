//! SVG overlay of data points and a fitted boundary.

use std::fmt::Write as _;

use crate::geometry::PointSet;
use crate::shape_model::{boundary_points, ShapeParams};
use crate::unit_shape::UnitShapeSpec;

/// Number of vertices of the rendered boundary polygon.
pub const BOUNDARY_VERTICES: usize = 720;

/// SVG 1.1 document in data units with the y axis flipped so +y points up.
pub fn render_svg(
    points: &PointSet<f64>,
    params: &ShapeParams<f64>,
    spec: &UnitShapeSpec<f64>,
) -> String {
    let boundary = boundary_points(params, spec, BOUNDARY_VERTICES);
    let all = points.iter().chain(boundary.iter());
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in all {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(-p.y);
        max_y = max_y.max(-p.y);
    }
    let extent = (max_x - min_x).max(max_y - min_y).max(1e-12);
    let margin = 0.05 * extent;
    let (vx, vy) = (min_x - margin, min_y - margin);
    let (vw, vh) = (max_x - min_x + 2.0 * margin, max_y - min_y + 2.0 * margin);
    let marker = 0.004 * extent;
    let stroke = 0.002 * extent;

    let mut s = String::new();
    writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{vx} {vy} {vw} {vh}" width="800" height="{}">"#,
        (800.0 * vh / vw).round().max(1.0)
    )
    .unwrap();
    writeln!(s, r##"  <g id="points" fill="#1f77b4" stroke="none">"##).unwrap();
    for p in points.iter() {
        writeln!(
            s,
            r#"    <circle cx="{}" cy="{}" r="{marker}"/>"#,
            p.x, -p.y
        )
        .unwrap();
    }
    writeln!(s, "  </g>").unwrap();
    let mut coords = String::new();
    for (i, p) in boundary.iter().enumerate() {
        if i > 0 {
            coords.push(' ');
        }
        write!(coords, "{},{}", p.x, -p.y).unwrap();
    }
    writeln!(
        s,
        r##"  <polygon id="boundary" fill="none" stroke="#d62728" stroke-width="{stroke}" points="{coords}"/>"##
    )
    .unwrap();
    writeln!(s, "</svg>").unwrap();
    s
}
