//! SVG snapshots of stub states.

use std::fmt::Write as _;

use crate::geometry::EdgeId;
use crate::scheduler::{Instance, Schedule};
use crate::validator::stub_ratio_at;

const MARGIN: f64 = 20.0;

/// Stub states of a drawing at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub t: f64,
    /// Stub ratio per edge, in layout order.
    pub ratios: Vec<(EdgeId, f64)>,
    /// Positions of crossings covered by both stubs.
    pub active: Vec<(f64, f64)>,
}

pub fn frame(inst: &Instance, schedule: &Schedule, t: f64) -> Frame {
    let ratios: Vec<(EdgeId, f64)> = inst
        .layout
        .edges()
        .iter()
        .map(|e| (e.id, stub_ratio_at(inst, schedule, e.id, t)))
        .collect();
    let ratio_of = |id: EdgeId| ratios.iter().find(|r| r.0 == id).map_or(0.0, |r| r.1);
    let active = inst
        .records
        .chunks(2)
        .filter(|pair| pair.iter().all(|r| ratio_of(r.edge) >= r.ratio() - 1e-12))
        .map(|pair| {
            let r = &pair[0];
            let ((x0, y0), (x1, y1)) = inst.layout.endpoints(r.edge);
            (x0 + (x1 - x0) * r.s, y0 + (y1 - y0) * r.s)
        })
        .collect();
    Frame { t, ratios, active }
}

/// SVG image of the stubs at time `t`, with active crossings circled.
pub fn frame_svg(inst: &Instance, schedule: &Schedule, t: f64) -> String {
    let f = frame(inst, schedule, t);
    let nodes = inst.layout.nodes();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for n in nodes {
        x0 = x0.min(n.x);
        y0 = y0.min(n.y);
        x1 = x1.max(n.x);
        y1 = y1.max(n.y);
    }
    if nodes.is_empty() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.2} {:.2} {:.2} {:.2}" width="{:.0}" height="{:.0}">"#,
        x0 - MARGIN,
        y0 - MARGIN,
        x1 - x0 + 2.0 * MARGIN,
        y1 - y0 + 2.0 * MARGIN,
        x1 - x0 + 2.0 * MARGIN,
        y1 - y0 + 2.0 * MARGIN,
    );
    let _ = writeln!(s, r#"<title>t = {:.0} ms</title>"#, t);
    let _ = writeln!(s, r##"<g stroke="#ddd" stroke-width="1">"##);
    for e in inst.layout.edges() {
        let ((ax, ay), (bx, by)) = inst.layout.endpoints(e.id);
        let _ = writeln!(
            s,
            r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}"/>"#
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r##"<g stroke="#246" stroke-width="2" stroke-linecap="round">"##
    );
    for &(id, ratio) in &f.ratios {
        let ((ax, ay), (bx, by)) = inst.layout.endpoints(id);
        let (dx, dy) = ((bx - ax) * ratio, (by - ay) * ratio);
        let _ = writeln!(
            s,
            r#"<line class="stub" data-edge="{}" x1="{ax:.2}" y1="{ay:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            id.0,
            ax + dx,
            ay + dy
        );
        let _ = writeln!(
            s,
            r#"<line class="stub" data-edge="{}" x1="{bx:.2}" y1="{by:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            id.0,
            bx - dx,
            by - dy
        );
    }
    let _ = writeln!(s, "</g>");
    for n in nodes {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#222"/>"##,
            n.x, n.y
        );
    }
    for &(x, y) in &f.active {
        let _ = writeln!(
            s,
            r##"<circle class="crossing" cx="{x:.2}" cy="{y:.2}" r="6" fill="none" stroke="#d22" stroke-width="2"/>"##
        );
    }
    s.push_str("</svg>\n");
    s
}
