//! Deterministic SVG figures: one panel per sheet, or a strip of candidates.

use std::fmt::Write as _;

use steiner_cover_core::covering::CoveringSpace;
use steiner_cover_core::geom::{polygon_centroid, signed_area, Arrangement};
use steiner_cover_core::steiner::Network;
use steiner_cover_core::Point2;

use crate::scene::Scene;

const GAP: f64 = 16.0;
const TITLE: f64 = 22.0;
const SET_FILL: &str = "#d6e6f5";

#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Panel side in pixels.
    pub panel: f64,
    pub arrows: bool,
    /// Which set and field of the scene to draw.
    pub set: usize,
    pub field: usize,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { panel: 260.0, arrows: true, set: 0, field: 0 }
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Maps plane coordinates into a square panel with the y axis pointing up.
#[derive(Clone, Copy)]
struct View {
    ox: f64,
    oy: f64,
    min: Point2,
    scale: f64,
    size: f64,
}

impl View {
    fn new(pts: &[Point2], ox: f64, oy: f64, size: f64) -> View {
        let (mut lo, mut hi) =
            (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pts {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9) * 1.08;
        let centre = (lo + hi) * 0.5;
        let min = centre - Point2::new(span / 2.0, span / 2.0);
        View { ox, oy, min, scale: size / span, size }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        (self.ox + (p.x - self.min.x) * self.scale, self.oy + self.size - (p.y - self.min.y) * self.scale)
    }

    fn pt(&self, p: Point2) -> String {
        let (x, y) = self.map(p);
        format!("{},{}", num(x), num(y))
    }

    fn ring_path(&self, ring: &[Point2]) -> String {
        let mut d = String::new();
        for (k, p) in ring.iter().enumerate() {
            d.push_str(if k == 0 { "M" } else { "L" });
            d.push_str(&self.pt(*p));
        }
        d.push('Z');
        d
    }

    fn line(&self, out: &mut String, a: Point2, b: Point2, style: &str) {
        let (x1, y1) = self.map(a);
        let (x2, y2) = self.map(b);
        let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" {style}/>"#, num(x1), num(y1), num(x2), num(y2));
    }
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="11">"#,
        num(width),
        num(height),
        num(width),
        num(height)
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, num(width), num(height));
}

fn frame(out: &mut String, v: &View, id: &str, title: &str, stroke: &str) {
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, num(v.ox), num(v.oy - 6.0), escape(title));
    let _ = writeln!(
        out,
        r#"<clipPath id="{id}"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>"#,
        num(v.ox),
        num(v.oy),
        num(v.size),
        num(v.size)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{stroke}"/>"#,
        num(v.ox),
        num(v.oy),
        num(v.size),
        num(v.size)
    );
}

fn draw_cuts(out: &mut String, v: &View, cov: &CoveringSpace) {
    for c in &cov.cuts.sigma {
        for s in c.segments() {
            v.line(out, s.a, s.b, r##"stroke="#888" stroke-width="1" stroke-dasharray="5 3""##);
        }
    }
    for c in &cov.cuts.sigma_prime {
        for s in c.segments() {
            v.line(out, s.a, s.b, r##"stroke="#bbb" stroke-width="1" stroke-dasharray="1 3""##);
        }
    }
}

fn draw_network(out: &mut String, v: &View, net: &Network, style: &str) {
    for s in net.segments() {
        v.line(out, s.a, s.b, style);
    }
}

fn draw_terminals(out: &mut String, v: &View, pts: &[Point2]) {
    for (k, p) in pts.iter().enumerate() {
        let (x, y) = v.map(*p);
        let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="3" fill="black"/>"#, num(x), num(y));
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="10">{}</text>"#, num(x + 4.0), num(y - 4.0), k + 1);
    }
}

fn face_path(v: &View, arr: &Arrangement, f: usize) -> String {
    let mut d = v.ring_path(&arr.face_ring(f));
    for hole in &arr.faces[f].holes {
        let ring: Vec<Point2> = hole.iter().map(|&i| arr.vertices[i]).collect();
        d.push_str(&v.ring_path(&ring));
    }
    d
}

fn arrow(out: &mut String, from: (f64, f64), d: (f64, f64)) {
    let len = (d.0 * d.0 + d.1 * d.1).sqrt();
    if len < 0.5 {
        return;
    }
    let to = (from.0 + d.0, from.1 + d.1);
    let (ux, uy) = (d.0 / len, d.1 / len);
    let h = 4.0_f64.min(len / 2.0);
    let l = (to.0 - ux * h - uy * h * 0.6, to.1 - uy * h + ux * h * 0.6);
    let r = (to.0 - ux * h + uy * h * 0.6, to.1 - uy * h - ux * h * 0.6);
    let _ = writeln!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c0392b" stroke-width="1"/>"##,
        num(from.0),
        num(from.1),
        num(to.0),
        num(to.1)
    );
    let _ = writeln!(
        out,
        r##"<polygon points="{},{} {},{} {},{}" fill="#c0392b"/>"##,
        num(to.0),
        num(to.1),
        num(l.0),
        num(l.1),
        num(r.0),
        num(r.1)
    );
}

/// Per-sheet panels of the scene's set and field, or a dot plot of the
/// configuration when the scene has neither.
pub fn render_svg(scene: &Scene, opts: &SvgOptions) -> String {
    let cov = &scene.covering;
    let m = cov.m();
    let set = scene.sets.get(opts.set);
    let field = scene.fields.get(opts.field).filter(|_| opts.arrows);
    let panels = if set.is_some() || field.is_some() { m } else { 1 };
    let mut extent: Vec<Point2> = cov.cuts.omega.clone();
    extent.extend_from_slice(&cov.config.points);

    let p = opts.panel;
    let width = GAP + panels as f64 * (p + GAP);
    let legend = if field.is_some() { 28.0 } else { 0.0 };
    let height = GAP + TITLE + p + GAP + legend;
    let mut out = String::new();
    header(&mut out, width, height);
    if let Some(name) = &scene.name {
        let _ = writeln!(out, r#"<title>{}</title>"#, escape(name));
    }

    // Arrow scale shared by every panel.
    let vmax =
        field.map(|f| f.values.iter().flat_map(|v| v.iter()).map(|x| x.norm()).fold(0.0, f64::max)).unwrap_or(0.0);
    let arrow_px = 0.1 * p;

    for j in 1..=panels {
        let v = View::new(&extent, GAP + (j - 1) as f64 * (p + GAP), GAP + TITLE, p);
        let id = format!("panel{j}");
        let title = if panels == 1 {
            scene.name.clone().unwrap_or_else(|| "configuration".into())
        } else {
            format!("sheet {j}")
        };
        frame(&mut out, &v, &id, &title, "#999");
        let _ = writeln!(out, r#"<g clip-path="url(#{id})">"#);
        if let Some(set) = set {
            let arr = &set.arrangement;
            for f in arr.bounded_faces().filter(|&f| set.labels[f] == j) {
                let _ = writeln!(
                    out,
                    r#"<path d="{}" fill="{SET_FILL}" fill-rule="evenodd" stroke="none"/>"#,
                    face_path(&v, arr, f)
                );
            }
        }
        draw_cuts(&mut out, &v, cov);
        if let Some(set) = set {
            for e in set.boundary_edges() {
                let s = set.arrangement.segment(&set.arrangement.edges[e]);
                v.line(&mut out, s.a, s.b, r##"stroke="#1f4e79" stroke-width="1.2""##);
            }
        }
        for net in &scene.networks {
            draw_network(&mut out, &v, net, r#"stroke="black" stroke-width="1.6""#);
        }
        if let Some(f) = field {
            if vmax > 0.0 {
                let k = arrow_px / vmax;
                for face in f.complex.bounded_faces() {
                    let ring = f.complex.face_ring(face);
                    if signed_area(&ring).abs() < 1e-9 {
                        continue;
                    }
                    let c = polygon_centroid(&ring);
                    let val = f.values[face][j - 1];
                    arrow(&mut out, v.map(c), (val.x * k, -val.y * k));
                }
            }
        }
        let _ = writeln!(out, "</g>");
        draw_terminals(&mut out, &v, &cov.config.points);
    }
    if field.is_some() && vmax > 0.0 {
        let y = GAP + TITLE + p + GAP + 10.0;
        arrow(&mut out, (GAP, y), (arrow_px, 0.0));
        let _ =
            writeln!(out, r#"<text x="{}" y="{}">|Φ| = {:.4}</text>"#, num(GAP + arrow_px + 8.0), num(y + 4.0), vmax);
    }
    out.push_str("</svg>\n");
    out
}

/// One entry of a comparison strip.
#[derive(Clone, Debug)]
pub struct StripItem {
    pub title: String,
    pub subtitle: String,
    pub network: Option<Network>,
    pub highlight: bool,
}

/// Small panels in rows of at most `per_row`, each with the terminals and a
/// network; highlighted panels get a green frame.
pub fn render_strip(cov: &CoveringSpace, items: &[StripItem], per_row: usize) -> String {
    let p = 150.0;
    let cols = items.len().clamp(1, per_row.max(1));
    let rows = items.len().div_ceil(cols).max(1);
    let cell_h = TITLE + 14.0 + p + GAP;
    let width = GAP + cols as f64 * (p + GAP);
    let height = GAP + rows as f64 * cell_h;
    let mut extent = cov.config.points.clone();
    for it in items {
        if let Some(n) = &it.network {
            extent.extend_from_slice(&n.steiner);
        }
    }
    let mut out = String::new();
    header(&mut out, width, height);
    for (k, it) in items.iter().enumerate() {
        let (r, c) = (k / cols, k % cols);
        let v = View::new(&extent, GAP + c as f64 * (p + GAP), GAP + r as f64 * cell_h + TITLE + 14.0, p);
        let stroke = if it.highlight { "#2e8b57" } else { "#999" };
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="10">{}</text>"#,
            num(v.ox),
            num(v.oy - 20.0),
            escape(&it.title)
        );
        frame(&mut out, &v, &format!("strip{k}"), &it.subtitle, stroke);
        if let Some(n) = &it.network {
            let style = if it.highlight {
                r##"stroke="#2e8b57" stroke-width="2""##
            } else {
                r#"stroke="black" stroke-width="1.4""#
            };
            draw_network(&mut out, &v, n, style);
        }
        draw_terminals(&mut out, &v, &cov.config.points);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{fixture_scene, SceneFile};
    use steiner_cover_core::EPS_GEO;

    #[test]
    fn config_only_is_a_dot_plot() {
        let s = SceneFile::from_json(r#"{"version": "steiner-cover/1", "config": [[0,0],[1,0],[0,1]]}"#).unwrap();
        let svg = render_svg(&s.resolve(EPS_GEO).unwrap(), &SvgOptions::default());
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<clipPath").count(), 1);
    }

    #[test]
    fn pentagon_has_five_panels_and_is_stable() {
        let s = fixture_scene("pentagon(1)").unwrap().resolve(EPS_GEO).unwrap();
        let a = render_svg(&s, &SvgOptions::default());
        assert_eq!(a.matches("<clipPath").count(), 5);
        assert!(a.contains("sheet 5"));
        assert_eq!(a, render_svg(&s, &SvgOptions::default()));
    }
}
