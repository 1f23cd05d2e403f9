use serde::{Deserialize, Serialize};

use super::layout::{EdgeId, GraphLayout};
use super::{orient, GeometryError, MorphProfile};

/// Slack for ratio comparisons against δ and η.
pub(crate) const RATIO_EPS: f64 = 1e-12;

/// How one edge's stub relates to a crossing point on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PassKind {
    /// Covered even at the shortest stub state.
    AlwaysPassing,
    /// Covered only while the stub is stretched (or never, if out of reach).
    Avoidable,
}

/// Class of a geometric crossing, from both incident edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    FullyAvoidable,
    SemiAvoidable,
    AlwaysCrossing,
}

/// One directed incidence of a crossing: `edge` crosses `opposite` at
/// parameter `s` measured from endpoint `a` of `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionRecord {
    pub edge: EdgeId,
    pub opposite: EdgeId,
    /// Index of the geometric crossing; shared by both directed records.
    pub crossing: usize,
    pub s: f64,
    /// Distance in px from the nearer endpoint of `edge`.
    pub d: f64,
    pub length: f64,
    pub kind: PassKind,
    pub class: PointClass,
}

impl IntersectionRecord {
    /// `min(s, 1 - s)`: stub ratio at which the tip reaches the point.
    pub fn ratio(&self) -> f64 {
        self.s.min(1.0 - self.s)
    }

    /// Sets `kind` for this edge side; `class` needs the paired record, see
    /// [`classify_all`].
    pub fn classify(mut self, profile: &MorphProfile) -> Self {
        self.kind = if self.ratio() <= profile.delta + RATIO_EPS {
            PassKind::AlwaysPassing
        } else {
            PassKind::Avoidable
        };
        self
    }

    pub fn always_passing(&self) -> bool {
        self.kind == PassKind::AlwaysPassing
    }
}

/// Enumerates proper crossings between non-incident edges. Records are returned
/// in directed pairs: indices `2i` and `2i + 1` describe crossing `i`.
pub fn compute_intersections(
    layout: &GraphLayout,
) -> Result<Vec<IntersectionRecord>, GeometryError> {
    let edges = layout.edges();
    let mut records = Vec::new();
    for (i, e1) in edges.iter().enumerate() {
        let (p1, p2) = layout.endpoints(e1.id);
        for e2 in &edges[i + 1..] {
            if e1.a == e2.a || e1.a == e2.b || e1.b == e2.a || e1.b == e2.b {
                continue;
            }
            let (q1, q2) = layout.endpoints(e2.id);
            let o1 = orient(p1, p2, q1);
            let o2 = orient(p1, p2, q2);
            let o3 = orient(q1, q2, p1);
            let o4 = orient(q1, q2, p2);
            if o1 == 0.0 && o2 == 0.0 && overlaps_collinear(p1, p2, q1, q2) {
                return Err(GeometryError::CollinearOverlap(e1.id, e2.id));
            }
            if !(o1 * o2 < 0.0 && o3 * o4 < 0.0) {
                continue;
            }
            let r = (p2.0 - p1.0, p2.1 - p1.1);
            let q = (q2.0 - q1.0, q2.1 - q1.1);
            let denom = r.0 * q.1 - r.1 * q.0;
            let w = (q1.0 - p1.0, q1.1 - p1.1);
            let s = (w.0 * q.1 - w.1 * q.0) / denom;
            let u = (w.0 * r.1 - w.1 * r.0) / denom;
            let crossing = records.len() / 2;
            for (edge, opposite, param) in [(e1.id, e2.id, s), (e2.id, e1.id, u)] {
                let length = layout.edge_length(edge);
                records.push(IntersectionRecord {
                    edge,
                    opposite,
                    crossing,
                    s: param,
                    d: param.min(1.0 - param) * length,
                    length,
                    kind: PassKind::Avoidable,
                    class: PointClass::FullyAvoidable,
                });
            }
        }
    }
    Ok(records)
}

fn overlaps_collinear(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    // project on the dominant axis of p1p2
    let axis = |p: (f64, f64)| {
        if (p2.0 - p1.0).abs() >= (p2.1 - p1.1).abs() {
            p.0
        } else {
            p.1
        }
    };
    let (a0, a1) = (axis(p1).min(axis(p2)), axis(p1).max(axis(p2)));
    let (b0, b1) = (axis(q1).min(axis(q2)), axis(q1).max(axis(q2)));
    a0.max(b0) < a1.min(b1)
}

/// Classifies every record for the profile and assigns point classes from the
/// directed pairs.
pub fn classify_all(
    records: &[IntersectionRecord],
    profile: &MorphProfile,
) -> Vec<IntersectionRecord> {
    let mut out: Vec<IntersectionRecord> = records.iter().map(|r| r.classify(profile)).collect();
    for pair in out.chunks_mut(2) {
        let [a, b] = pair else {
            unreachable!("records come in directed pairs")
        };
        debug_assert_eq!(a.crossing, b.crossing);
        let class = match (a.always_passing(), b.always_passing()) {
            (true, true) => PointClass::AlwaysCrossing,
            (false, false) => PointClass::FullyAvoidable,
            _ => PointClass::SemiAvoidable,
        };
        a.class = class;
        b.class = class;
    }
    out
}
