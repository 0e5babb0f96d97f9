use std::fmt::Write as _;

use super::PointRecord;
use crate::geometry::Position;
use crate::navmesh::{Goal, NavMesh, PointClass};

const PIXELS_PER_METER: f64 = 8.0;
const MARGIN: f64 = 2.0;
const MESH_FILL: &str = "#d9d9d9";
const MESH_STROKE: &str = "#808080";
const NEAR_MESH: &str = "#ff00ff";
const OFF_MESH: &str = "#ffd700";
const REACHED: &str = "#00a000";
const UNREACHED: &str = "#d00000";

/// Orthographic top-down map: mesh outlines, archived points coloured by
/// class, then goals coloured by status. North is up.
///
/// Coordinates are snapped to their 6-decimal text form first, so a map
/// rendered from in-memory results and one rendered from the exported files
/// are byte-identical.
pub fn render_topdown(points: &[PointRecord], goals: &[Goal], mesh: &NavMesh) -> String {
    let snap = |p: &Position| p.quantized();
    let polygons: Vec<Vec<Position>> = mesh
        .polygons()
        .iter()
        .map(|poly| poly.vertices().iter().map(snap).collect())
        .collect();
    let pts: Vec<(Position, PointClass)> = points.iter().map(|p| (snap(&p.position), p.class)).collect();
    let gs: Vec<(Position, bool)> = goals.iter().map(|g| (snap(&g.position), g.is_reached())).collect();

    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
    let all = polygons
        .iter()
        .flatten()
        .chain(pts.iter().map(|(p, _)| p))
        .chain(gs.iter().map(|(p, _)| p));
    for p in all {
        xs = (xs.0.min(p.x), xs.1.max(p.x));
        ys = (ys.0.min(p.y), ys.1.max(p.y));
    }
    if xs.0 > xs.1 {
        xs = (0.0, 1.0);
        ys = (0.0, 1.0);
    }
    let (x0, y1) = (xs.0 - MARGIN, ys.1 + MARGIN);
    let w = xs.1 - xs.0 + 2.0 * MARGIN;
    let h = ys.1 - ys.0 + 2.0 * MARGIN;
    let sx = |x: f64| x - x0;
    let sy = |y: f64| y1 - y;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {w:.3} {h:.3}">"#,
        (w * PIXELS_PER_METER).ceil(),
        (h * PIXELS_PER_METER).ceil(),
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w:.3}" height="{h:.3}" fill="white"/>"#);
    let _ = writeln!(out, r#"<g id="mesh" fill="{MESH_FILL}" stroke="{MESH_STROKE}" stroke-width="0.1">"#);
    for poly in &polygons {
        out.push_str("<polygon points=\"");
        for (i, v) in poly.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.3},{:.3}", sx(v.x), sy(v.y));
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</g>\n");
    for (id, class, colour) in [("near-mesh", PointClass::NearMesh, NEAR_MESH), ("off-mesh", PointClass::OffMesh, OFF_MESH)] {
        let _ = writeln!(out, r#"<g id="{id}" fill="{colour}">"#);
        for (p, _) in pts.iter().filter(|(_, c)| *c == class) {
            let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="0.25"/>"#, sx(p.x), sy(p.y));
        }
        out.push_str("</g>\n");
    }
    for (id, reached, colour) in [("goals-reached", true, REACHED), ("goals-unreached", false, UNREACHED)] {
        let _ = writeln!(out, r#"<g id="{id}" fill="{colour}" stroke="black" stroke-width="0.05">"#);
        for (p, _) in gs.iter().filter(|(_, r)| *r == reached) {
            let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="0.4"/>"#, sx(p.x), sy(p.y));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
