//! Static SVG rendering of 2-D traces: set boundaries plus the polyline of
//! inner iterates with per-step arrowheads. Output bytes are a pure
//! function of the inputs, so renders of the same trace diff clean.

use std::fmt::Write as _;

use super::trace_csv::TracePoint;
use super::CliError;
use crate::geometry::{ScalarConvexFn, SetKind, Vector};
use crate::operators::CyclicProblem;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 48.0;

/// Data-to-viewport transform with uniform scale (circles stay circles)
/// and a flipped y axis.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub xmin: f64,
    pub ymin: f64,
    pub scale: f64,
    ox: f64,
    oy: f64,
}

impl Frame {
    pub fn from_points<'a>(points: impl Iterator<Item = &'a TracePoint>) -> Frame {
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            xmin = xmin.min(p.coords[0]);
            xmax = xmax.max(p.coords[0]);
            ymin = ymin.min(p.coords[1]);
            ymax = ymax.max(p.coords[1]);
        }
        let pad = |lo: &mut f64, hi: &mut f64| {
            let span = (*hi - *lo).max(1e-9);
            *lo -= 0.15 * span;
            *hi += 0.15 * span;
        };
        pad(&mut xmin, &mut xmax);
        pad(&mut ymin, &mut ymax);
        let scale =
            ((WIDTH - 2.0 * MARGIN) / (xmax - xmin)).min((HEIGHT - 2.0 * MARGIN) / (ymax - ymin));
        let ox = 0.5 * (WIDTH - (xmax - xmin) * scale);
        let oy = 0.5 * (HEIGHT - (ymax - ymin) * scale);
        Frame {
            xmin,
            ymin,
            scale,
            ox,
            oy,
        }
    }

    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.ox + (x - self.xmin) * self.scale,
            HEIGHT - self.oy - (y - self.ymin) * self.scale,
        )
    }

    /// Data-coordinate bounding box of the drawable area.
    fn data_bounds(&self) -> (f64, f64, f64, f64) {
        let xmax = self.xmin + (WIDTH - 2.0 * self.ox) / self.scale;
        let ymax = self.ymin + (HEIGHT - 2.0 * self.oy) / self.scale;
        (self.xmin, xmax, self.ymin, ymax)
    }
}

pub fn fmt_coord(v: f64) -> String {
    format!("{v:.6}")
}

/// Renders a 2-D trace. When `problem` is given, boundaries of its sets are
/// drawn behind the iterate polyline.
pub fn render_svg(
    points: &[TracePoint],
    problem: Option<&CyclicProblem>,
) -> Result<String, CliError> {
    if points.is_empty() {
        return Err(CliError::EmptyTrace);
    }
    let dim = points[0].coords.len();
    if dim != 2 {
        return Err(CliError::UnsupportedDimension { dim });
    }
    let frame = Frame::from_points(points.iter());
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r##"<defs><marker id="step" viewBox="0 0 10 10" refX="8" refY="5" markerWidth="5.5" markerHeight="5.5" orient="auto"><path d="M 0 1 L 9 5 L 0 9 z" fill="#1f77b4"/></marker></defs>"##
    );
    let _ = writeln!(
        svg,
        r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );

    if let Some(problem) = problem {
        for set in problem.sets() {
            draw_set(&mut svg, set.kind(), &frame);
        }
    }

    let mut coords = String::new();
    for p in points {
        let (sx, sy) = frame.map(p.coords[0], p.coords[1]);
        if !coords.is_empty() {
            coords.push(' ');
        }
        let _ = write!(coords, "{},{}", fmt_coord(sx), fmt_coord(sy));
    }
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#1f77b4" stroke-width="1.4" marker-mid="url(#step)" marker-end="url(#step)" points="{coords}"/>"##
    );
    let (sx, sy) = frame.map(points[0].coords[0], points[0].coords[1]);
    let _ = writeln!(
        svg,
        r##"<circle cx="{}" cy="{}" r="3.5" fill="#d62728"/>"##,
        fmt_coord(sx),
        fmt_coord(sy)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn draw_set(svg: &mut String, kind: &SetKind, frame: &Frame) {
    let (xmin, xmax, ymin, ymax) = frame.data_bounds();
    let diag = ((xmax - xmin).powi(2) + (ymax - ymin).powi(2)).sqrt();
    match kind {
        SetKind::Hyperplane { normal, offset } => {
            draw_line(svg, normal, *offset, diag, frame, "#2ca02c");
        }
        SetKind::AffineSubspace { rows } => {
            for (normal, offset) in rows {
                draw_line(svg, normal, *offset, diag, frame, "#2ca02c");
            }
        }
        SetKind::Halfspace { normal, offset } => {
            let n2 = normal.norm_squared();
            let p0 = normal.scaled(offset / n2);
            let nn = normal.scaled(1.0 / n2.sqrt());
            let t = Vector::from_raw(vec![-nn[1], nn[0]]);
            let l = 2.0 * diag;
            let quad = [
                p0.add_scaled(-l, &t),
                p0.add_scaled(l, &t),
                p0.add_scaled(l, &t).add_scaled(-l, &nn),
                p0.add_scaled(-l, &t).add_scaled(-l, &nn),
            ];
            let pts: Vec<String> = quad
                .iter()
                .map(|p| {
                    let (sx, sy) = frame.map(p[0], p[1]);
                    format!("{},{}", fmt_coord(sx), fmt_coord(sy))
                })
                .collect();
            let _ = writeln!(
                svg,
                r##"<polygon points="{}" fill="#2ca02c" fill-opacity="0.12" stroke="#2ca02c" stroke-width="1"/>"##,
                pts.join(" ")
            );
        }
        SetKind::Ball { center, radius } => {
            let (cx, cy) = frame.map(center[0], center[1]);
            let _ = writeln!(
                svg,
                r##"<circle cx="{}" cy="{}" r="{}" fill="#2ca02c" fill-opacity="0.12" stroke="#2ca02c" stroke-width="1"/>"##,
                fmt_coord(cx),
                fmt_coord(cy),
                fmt_coord(radius * frame.scale)
            );
        }
        SetKind::Box { lower, upper } => {
            let lx = lower[0].max(xmin - diag);
            let ly = lower[1].max(ymin - diag);
            let ux = upper[0].min(xmax + diag);
            let uy = upper[1].min(ymax + diag);
            let (sx, sy) = frame.map(lx, uy);
            let _ = writeln!(
                svg,
                r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#2ca02c" fill-opacity="0.12" stroke="#2ca02c" stroke-width="1"/>"##,
                fmt_coord(sx),
                fmt_coord(sy),
                fmt_coord((ux - lx) * frame.scale),
                fmt_coord((uy - ly) * frame.scale)
            );
        }
        SetKind::Epigraph {
            f,
            u_index,
            v_index,
        } => {
            let (umin, umax) = if matches!(f, ScalarConvexFn::HyperbolaBranch { .. }) {
                ((diag * 1e-4).max(1e-12), xmax + 0.1 * diag)
            } else {
                (xmin - 0.1 * diag, xmax + 0.1 * diag)
            };
            let samples = 256;
            let mut path = String::new();
            for k in 0..=samples {
                let u = umin + (umax - umin) * (k as f64) / (samples as f64);
                let v = f.eval(u);
                if !v.is_finite() {
                    continue;
                }
                let mut coords = [0.0; 2];
                coords[*u_index] = u;
                coords[*v_index] = v;
                let (sx, sy) = frame.map(coords[0], coords[1]);
                let _ = write!(
                    path,
                    "{}{},{}",
                    if path.is_empty() { "M " } else { " L " },
                    fmt_coord(sx),
                    fmt_coord(sy)
                );
            }
            // Fill toward the unbounded side for the standard embedding.
            if (*u_index, *v_index) == (0, 1) && !path.is_empty() {
                let top = ymax + diag;
                let (ex, ey) = frame.map(umax, top);
                let (bx, by) = frame.map(umin, top);
                let _ = writeln!(
                    svg,
                    r##"<path d="{path} L {},{} L {},{} Z" fill="#2ca02c" fill-opacity="0.12" stroke="none"/>"##,
                    fmt_coord(ex),
                    fmt_coord(ey),
                    fmt_coord(bx),
                    fmt_coord(by)
                );
            }
            let _ = writeln!(
                svg,
                r##"<path d="{path}" fill="none" stroke="#2ca02c" stroke-width="1"/>"##
            );
        }
    }
}

fn draw_line(
    svg: &mut String,
    normal: &Vector,
    offset: f64,
    diag: f64,
    frame: &Frame,
    color: &str,
) {
    let n2 = normal.norm_squared();
    let p0 = normal.scaled(offset / n2);
    let t = Vector::from_raw(vec![-normal[1], normal[0]]).scaled(1.0 / n2.sqrt());
    let a = p0.add_scaled(-2.0 * diag, &t);
    let b = p0.add_scaled(2.0 * diag, &t);
    let (ax, ay) = frame.map(a[0], a[1]);
    let (bx, by) = frame.map(b[0], b[1]);
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="1"/>"#,
        fmt_coord(ax),
        fmt_coord(ay),
        fmt_coord(bx),
        fmt_coord(by)
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(cycle: u64, slot: usize, x: f64, y: f64) -> TracePoint {
        TracePoint {
            cycle,
            slot,
            coords: vec![x, y],
        }
    }

    #[test]
    fn polyline_matches_trace_points_exactly() {
        let points = vec![
            tp(1, 1, 0.0, 0.0),
            tp(1, 2, 0.5, 1.0),
            tp(2, 1, 0.25, 0.5),
            tp(2, 2, 0.4, 0.8),
        ];
        let svg = render_svg(&points, None).unwrap();
        let frame = Frame::from_points(points.iter());
        let expected: Vec<String> = points
            .iter()
            .map(|p| {
                let (sx, sy) = frame.map(p.coords[0], p.coords[1]);
                format!("{},{}", fmt_coord(sx), fmt_coord(sy))
            })
            .collect();
        let needle = format!("points=\"{}\"", expected.join(" "));
        assert!(
            svg.contains(&needle),
            "polyline coordinates drifted:\n{svg}"
        );
    }

    #[test]
    fn rendering_is_deterministic() {
        let points = vec![tp(1, 1, -1.0, 2.0), tp(1, 2, 3.0, -4.0), tp(2, 1, 0.0, 0.0)];
        assert_eq!(
            render_svg(&points, None).unwrap(),
            render_svg(&points, None).unwrap()
        );
    }

    #[test]
    fn empty_and_non_planar_traces_are_rejected() {
        assert!(matches!(render_svg(&[], None), Err(CliError::EmptyTrace)));
        let p3 = TracePoint {
            cycle: 1,
            slot: 1,
            coords: vec![0.0, 0.0, 0.0],
        };
        assert!(matches!(
            render_svg(&[p3], None),
            Err(CliError::UnsupportedDimension { dim: 3 })
        ));
    }
}
