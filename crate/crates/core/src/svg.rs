//! SVG rendering on a fixed 800x800 viewport.

use std::fmt::Write;

use crate::chain_path::Trace;
use crate::geometry::ExactPoint;
use crate::rsa::Arborescence;
use crate::triangulation::{SimplePolygon, Triangulation};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

struct Frame {
    min_x: f64,
    min_y: f64,
    scale: f64,
}

impl Frame {
    fn fit(pts: impl IntoIterator<Item = (f64, f64)>) -> Frame {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for (x, y) in pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        Frame { min_x: x0, min_y: y0, scale: (SIZE - 2.0 * MARGIN) / span }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (MARGIN + (x - self.min_x) * self.scale, SIZE - MARGIN - (y - self.min_y) * self.scale)
    }
}

fn f(p: &ExactPoint) -> (f64, f64) {
    (p.x.to_f64(), p.y.to_f64())
}

fn open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    )
}

fn line(out: &mut String, a: (f64, f64), b: (f64, f64), class: &str, stroke: &str, width: f64) {
    writeln!(
        out,
        "<line class=\"{class}\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
        a.0, a.1, b.0, b.1
    )
    .unwrap();
}

fn polygon_body(out: &mut String, p: &SimplePolygon, fr: &Frame) {
    let pts: Vec<String> = p
        .vertices()
        .iter()
        .map(|v| {
            let (x, y) = fr.map(f(v));
            format!("{x:.3},{y:.3}")
        })
        .collect();
    writeln!(out, "<polygon class=\"boundary\" points=\"{}\" fill=\"#f4f4f4\" stroke=\"black\" stroke-width=\"1.5\"/>", pts.join(" ")).unwrap();
    for (i, v) in p.vertices().iter().enumerate() {
        let (x, y) = fr.map(f(v));
        writeln!(out, "<circle class=\"vertex\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"2.5\" fill=\"black\"/>").unwrap();
        if let Some(l) = p.label(i) {
            writeln!(out, "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"10\">{l}</text>", x + 4.0, y - 4.0).unwrap();
        }
    }
}

pub fn polygon_svg(p: &SimplePolygon) -> String {
    let fr = Frame::fit(p.vertices().iter().map(f));
    let mut out = open();
    polygon_body(&mut out, p, &fr);
    out.push_str("</svg>\n");
    out
}

pub fn triangulation_svg(t: &Triangulation) -> String {
    let p = t.polygon();
    let fr = Frame::fit(p.vertices().iter().map(f));
    let mut out = open();
    polygon_body(&mut out, p, &fr);
    for d in t.diagonals() {
        line(&mut out, fr.map(f(p.vertex(d.0))), fr.map(f(p.vertex(d.1))), "diagonal", "#1f5fbf", 1.0);
    }
    out.push_str("</svg>\n");
    out
}

fn grid_point(p: (i64, i64)) -> (f64, f64) {
    (p.0 as f64, p.1 as f64)
}

pub fn trace_svg(t: &Trace) -> String {
    let corners = t.boxes.iter().flat_map(|&(x, y)| [(x, y), (x + 1, y + 1)]);
    let ends = t.edges.iter().flat_map(|&(a, b)| [a, b]);
    let fr = Frame::fit(corners.chain(ends).map(grid_point));
    let mut out = open();
    for &(x, y) in &t.boxes {
        let (ax, ay) = fr.map(grid_point((x, y + 1)));
        writeln!(
            out,
            "<rect class=\"box\" x=\"{ax:.3}\" y=\"{ay:.3}\" width=\"{s:.3}\" height=\"{s:.3}\" fill=\"#f2b84b\" stroke=\"#7a4f00\" stroke-width=\"1\"/>",
            s = fr.scale
        )
        .unwrap();
    }
    for &(a, b) in &t.edges {
        line(&mut out, fr.map(grid_point(a)), fr.map(grid_point(b)), "edge", "black", 2.0);
    }
    out.push_str("</svg>\n");
    out
}

pub fn arborescence_svg(a: &Arborescence) -> String {
    let fr = Frame::fit(a.segments.iter().flat_map(|s| [s.a, s.b]).chain([(0, 0)]).map(grid_point));
    let mut out = open();
    for s in &a.segments {
        line(&mut out, fr.map(grid_point(s.a)), fr.map(grid_point(s.b)), "segment", "#b02020", 2.0);
    }
    let (rx, ry) = fr.map((0.0, 0.0));
    writeln!(out, "<circle class=\"root\" cx=\"{rx:.3}\" cy=\"{ry:.3}\" r=\"4\" fill=\"black\"/>").unwrap();
    out.push_str("</svg>\n");
    out
}
