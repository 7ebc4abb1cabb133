use std::fmt::Write as _;

use zrd_core::numeric::QuotientFramework;
use zrd_core::Vertex;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 24.0;

/// Bars and joints of a 2-dimensional framework; joints are titled with
/// their `(vertex, shift)` origin.
pub fn render(fw: &QuotientFramework, origin: &[(Vertex, i64)]) -> String {
    let pts: Vec<(f64, f64)> = fw.positions.column_iter().map(|c| (c[0], c[1])).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let k = (SIZE - 2.0 * MARGIN) / span;
    // flip y so the picture reads like a plot
    let map = |(x, y): (f64, f64)| (MARGIN + (x - x0) * k, SIZE - MARGIN - (y - y0) * k);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    );
    out.push_str("<g stroke=\"#333\" stroke-width=\"2\">\n");
    for e in fw.graph.edges() {
        let (ax, ay) = map(pts[e.tail - 1]);
        let (bx, by) = map(pts[e.head - 1]);
        let _ = writeln!(out, "<line x1=\"{ax:.2}\" y1=\"{ay:.2}\" x2=\"{bx:.2}\" y2=\"{by:.2}\"/>");
    }
    out.push_str("</g>\n<g fill=\"#c33\">\n");
    for (k, &p) in pts.iter().enumerate() {
        let (x, y) = map(p);
        let (v, s) = origin.get(k).copied().unwrap_or((k + 1, 0));
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\"><title>({v}, {s})</title></circle>");
    }
    out.push_str("</g>\n</svg>\n");
    out
}
