//! Static SVG orbit portraits.

use std::fmt::Write;

use bglue::geometry::ModelKind;
use bglue::glue::GluedManifold;
use bglue::verify::OrbitData;

use crate::config::SvgStyle;

/// Plot window `[x0, x1] x [y0, y1]` plus whether positions wrap around it.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    periodic: bool,
}

fn frame(host: &GluedManifold, orbits: &[OrbitData]) -> Frame {
    let kinds: Vec<&ModelKind> = host.pieces.iter().map(|m| &m.kind).collect();
    if kinds.iter().any(|k| matches!(k, ModelKind::Disk | ModelKind::Annulus)) {
        let r = if kinds.iter().any(|k| matches!(k, ModelKind::Annulus)) { 1.5 } else { 1.0 };
        return Frame { x0: -r, x1: r, y0: -r, y1: r, periodic: false };
    }
    if let [ModelKind::Torus { alpha }] = kinds.as_slice() {
        return Frame { x0: 0.0, x1: *alpha, y0: 0.0, y1: *alpha, periodic: true };
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in orbits.iter().flat_map(|o| &o.positions) {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-9);
    Frame { x0: x0 - pad, x1: x1 + pad, y0: y0 - pad, y1: y1 + pad, periodic: false }
}

/// Boundary and seam circles of a disk/annulus scene, as `(radius, is_seam)`.
fn circles(host: &GluedManifold) -> Vec<(f64, bool)> {
    let mut out: Vec<(f64, bool)> = Vec::new();
    for (i, m) in host.pieces.iter().enumerate() {
        for c in &m.boundary {
            let r = match (&m.kind, c.value == 0.0) {
                (ModelKind::Disk, _) | (ModelKind::Annulus, true) => 1.0,
                (ModelKind::Annulus, false) => 1.5,
                _ => continue,
            };
            let seam = host.seams.iter().any(|s| {
                (s.a.piece == i && s.a.component == c.name) || (s.b.piece == i && s.b.component == c.name)
            });
            if !out.iter().any(|(q, _)| *q == r) {
                out.push((r, seam));
            }
        }
    }
    out
}

pub fn portrait(host: &GluedManifold, orbits: &[OrbitData], fixed: &[Vec<f64>], style: &SvgStyle) -> String {
    let f = frame(host, orbits);
    let size = style.size as f64;
    let margin = 16.0;
    let scale = (size - 2.0 * margin) / (f.x1 - f.x0).max(f.y1 - f.y0);
    let px = |x: f64| margin + (x - f.x0) * scale;
    let py = |y: f64| size - margin - (y - f.y0) * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        style.size
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="{}"/>"#, style.background);

    let round = circles(host);
    for (r, seam) in &round {
        let (color, dash) = if *seam { (&style.seam, r#" stroke-dasharray="6 4""#) } else { (&style.boundary, "") };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            px(0.0),
            py(0.0),
            r * scale
        );
    }
    if let Some(r) = round.iter().map(|(r, _)| *r).reduce(f64::max) {
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{}" stroke-width="1"/>"#,
            px(-r),
            py(0.0),
            px(r),
            py(0.0),
            style.equator
        );
    }
    if f.periodic {
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            px(f.x0),
            py(f.y1),
            (f.x1 - f.x0) * scale,
            (f.y1 - f.y0) * scale,
            style.boundary
        );
    }

    for (i, o) in orbits.iter().enumerate() {
        let color = if style.orbits.is_empty() { "#000000" } else { &style.orbits[i % style.orbits.len()] };
        let pts: Vec<(f64, f64)> = o
            .positions
            .iter()
            .map(|p| {
                if f.periodic {
                    let w = f.x1 - f.x0;
                    (px(f.x0 + (p[0] - f.x0).rem_euclid(w)), py(f.y0 + (p[1] - f.y0).rem_euclid(f.y1 - f.y0)))
                } else {
                    (px(p[0]), py(p[1]))
                }
            })
            .collect();
        let _ = writeln!(s, r#"<g id="{}">"#, o.label);
        if !f.periodic {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="0.8" stroke-opacity="0.6"/>"#,
                path.join(" ")
            );
        }
        for (x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.2" fill="{color}"/>"#);
        }
        if let Some((x, y)) = pts.first() {
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="none" stroke="{color}" stroke-width="1.2"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    for p in fixed {
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{}"/>"#, px(p[0]), py(p[1]), style.fixed_points);
    }
    s.push_str("</svg>\n");
    s
}
