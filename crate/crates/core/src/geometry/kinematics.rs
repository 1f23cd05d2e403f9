use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::intersect::{IntersectionRecord, PointClass, RATIO_EPS};
use super::layout::{EdgeId, GraphLayout};
use super::GeometryError;
use crate::timeline::{Millis, TimePeriod};

/// Global morph parameters shared by every edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorphProfile {
    /// Stub ratio at rest.
    pub delta: f64,
    /// Stub ratio at full extension.
    pub eta: f64,
    /// Tip speed in px per second.
    pub speed: f64,
    /// Hold time at full extension, ms.
    pub pause: Millis,
}

impl MorphProfile {
    pub fn new(delta: f64, eta: f64, speed: f64, pause: Millis) -> Result<Self, GeometryError> {
        let ok = delta >= 0.0 && delta < eta && eta <= 0.5 && speed > 0.0 && pause >= 0;
        if ok && speed.is_finite() {
            Ok(MorphProfile {
                delta,
                eta,
                speed,
                pause,
            })
        } else {
            Err(GeometryError::BadProfile {
                delta,
                eta,
                speed,
                pause,
            })
        }
    }

    /// Tip travel time in real-valued ms for `px` pixels.
    pub fn travel_ms(&self, px: f64) -> f64 {
        px * 1000.0 / self.speed
    }

    /// Real-valued round trip (stretch, hold, shrink) for an edge of length `len`.
    pub fn trip_ms(&self, len: f64) -> f64 {
        2.0 * self.travel_ms((self.eta - self.delta) * len) + self.pause as f64
    }
}

/// Whether and how an edge's stub reaches one of its crossing points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reach {
    /// Covered at all times.
    Always,
    /// Covered during `[start + tau_pass, start + tau_ret)` of each morph.
    Window,
    /// Beyond the longest stub; never covered.
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMotion {
    pub crossing: usize,
    pub opposite: EdgeId,
    pub class: PointClass,
    pub reach: Reach,
    pub tau_pass: Millis,
    pub tau_ret: Millis,
}

/// Grid-level kinematic constants of one edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StubMotion {
    pub edge: EdgeId,
    pub length: f64,
    pub tau_trip: Millis,
    pub points: Vec<PointMotion>,
}

impl StubMotion {
    pub fn point(&self, crossing: usize) -> Option<&PointMotion> {
        self.points.iter().find(|p| p.crossing == crossing)
    }

    pub fn always_crossing_count(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.class == PointClass::AlwaysCrossing)
            .count()
    }
}

/// Values within this distance of an integer are snapped before rounding, so
/// float noise in exact cases does not cost a millisecond.
const SNAP: f64 = 1e-6;

pub(crate) fn floor_ms(x: f64) -> Millis {
    let r = x.round();
    if (x - r).abs() < SNAP {
        r as Millis
    } else {
        x.floor() as Millis
    }
}

pub(crate) fn ceil_ms(x: f64) -> Millis {
    let r = x.round();
    if (x - r).abs() < SNAP {
        r as Millis
    } else {
        x.ceil() as Millis
    }
}

/// Per-edge stub kinematics on the ms grid. `tau_pass` rounds down and
/// `tau_ret`/`tau_trip` round up, so grid passing windows contain the
/// continuous ones.
pub fn kinematics(
    layout: &GraphLayout,
    profile: &MorphProfile,
    records: &[IntersectionRecord],
) -> Vec<StubMotion> {
    let mut by_edge: BTreeMap<EdgeId, Vec<&IntersectionRecord>> = BTreeMap::new();
    for r in records {
        by_edge.entry(r.edge).or_default().push(r);
    }
    layout
        .edges()
        .iter()
        .map(|e| {
            let length = layout.edge_length(e.id);
            let trip = profile.trip_ms(length);
            let tau_trip = ceil_ms(trip);
            let points = by_edge
                .get(&e.id)
                .map(|rs| {
                    rs.iter()
                        .map(|r| point_motion(r, profile, length, trip, tau_trip))
                        .collect()
                })
                .unwrap_or_default();
            StubMotion {
                edge: e.id,
                length,
                tau_trip,
                points,
            }
        })
        .collect()
}

fn point_motion(
    r: &IntersectionRecord,
    profile: &MorphProfile,
    length: f64,
    trip: f64,
    tau_trip: Millis,
) -> PointMotion {
    let ratio = r.ratio();
    let (reach, tau_pass, tau_ret) = if r.always_passing() {
        (Reach::Always, 0, tau_trip)
    } else if ratio > profile.eta + RATIO_EPS {
        (Reach::Never, 0, 0)
    } else {
        let pass = profile.travel_ms((ratio - profile.delta) * length);
        let tau_pass = floor_ms(pass).max(0);
        let tau_ret = ceil_ms(trip - pass).min(tau_trip).max(tau_pass);
        (Reach::Window, tau_pass, tau_ret)
    };
    PointMotion {
        crossing: r.crossing,
        opposite: r.opposite,
        class: r.class,
        reach,
        tau_pass,
        tau_ret,
    }
}

/// Passing period `C` of an edge at a point given its start times: the
/// universe for always-passing points, empty when unscheduled or unreachable.
pub fn pass_period(point: &PointMotion, starts: &[Millis]) -> TimePeriod {
    match point.reach {
        Reach::Always => TimePeriod::universe(),
        Reach::Never => TimePeriod::empty(),
        Reach::Window => TimePeriod::from_intervals(
            starts
                .iter()
                .map(|&t| (t + point.tau_pass, t + point.tau_ret)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::intersect::{classify_all, compute_intersections};
    use crate::geometry::layout::{generate_circle_layout, Edge, Node, NodeId};
    use proptest::prelude::*;

    fn cross_motions(profile: &MorphProfile) -> Vec<StubMotion> {
        offset_cross_motions(profile, 0.0)
    }

    /// Horizontal edge 1 of length 200 crossed by a vertical edge 2 at `x`.
    fn offset_cross_motions(profile: &MorphProfile, x: f64) -> Vec<StubMotion> {
        let nodes = vec![
            Node {
                id: NodeId(0),
                x: -100.0,
                y: 0.0,
            },
            Node {
                id: NodeId(1),
                x: 100.0,
                y: 0.0,
            },
            Node {
                id: NodeId(2),
                x,
                y: -100.0,
            },
            Node {
                id: NodeId(3),
                x,
                y: 100.0,
            },
        ];
        let edges = vec![
            Edge {
                id: EdgeId(1),
                a: NodeId(0),
                b: NodeId(1),
            },
            Edge {
                id: EdgeId(2),
                a: NodeId(2),
                b: NodeId(3),
            },
        ];
        let layout = GraphLayout::new(nodes, edges).unwrap();
        let records = classify_all(&compute_intersections(&layout).unwrap(), profile);
        kinematics(&layout, profile, &records)
    }

    #[test]
    fn cross_example() {
        let profile = MorphProfile::new(0.25, 0.5, 100.0, 100).unwrap();
        let motions = cross_motions(&profile);
        let m = &motions[0];
        assert_eq!(m.tau_trip, 1100);
        assert_eq!((m.points[0].tau_pass, m.points[0].tau_ret), (500, 600));
        assert_eq!(m.points[0].reach, Reach::Window);
        assert_eq!(
            pass_period(&m.points[0], &[0]),
            TimePeriod::interval(500, 600)
        );
        assert!(pass_period(&m.points[0], &[]).is_empty());
    }

    #[test]
    fn diameter_touches_only_during_pause() {
        let layout = generate_circle_layout(4, 200.0).unwrap();
        let profile = MorphProfile::new(0.25, 0.5, 100.0, 100).unwrap();
        let records = classify_all(&compute_intersections(&layout).unwrap(), &profile);
        let motions = kinematics(&layout, &profile, &records);
        let diag = motions.iter().find(|m| !m.points.is_empty()).unwrap();
        assert_eq!(diag.tau_trip, 2100);
        assert_eq!(
            (diag.points[0].tau_pass, diag.points[0].tau_ret),
            (1000, 1100)
        );
    }

    #[test]
    fn boundary_at_delta_is_always_passing() {
        // d = 50 = δL on edge 1
        let profile = MorphProfile::new(0.25, 0.5, 100.0, 100).unwrap();
        let motions = offset_cross_motions(&profile, -50.0);
        let p = motions[0].points[0];
        assert_eq!(p.reach, Reach::Always);
        assert_eq!((p.tau_pass, p.tau_ret), (0, motions[0].tau_trip));
        assert!(pass_period(&p, &[]).is_universe());
        assert_eq!(motions[1].points[0].reach, Reach::Window);
    }

    #[test]
    fn unreachable_points_never_pass() {
        let profile = MorphProfile::new(0.1, 0.3, 100.0, 100).unwrap();
        let motions = cross_motions(&profile);
        assert_eq!(motions[0].points[0].reach, Reach::Never);
        assert!(pass_period(&motions[0].points[0], &[0, 5000]).is_empty());
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(MorphProfile::new(0.3, 0.2, 100.0, 0).is_err());
        assert!(MorphProfile::new(0.1, 0.6, 100.0, 0).is_err());
        assert!(MorphProfile::new(0.1, 0.5, 0.0, 0).is_err());
        assert!(MorphProfile::new(0.1, 0.5, 10.0, -1).is_err());
    }

    proptest! {
        #[test]
        fn windows_shrink_with_distance(
            n in 5u32..12, delta in 0.01f64..0.3, speed in 50.0f64..300.0, pause in 0i64..300
        ) {
            let layout = generate_circle_layout(n, 200.0).unwrap();
            let profile = MorphProfile::new(delta, 0.5, speed, pause).unwrap();
            let records = classify_all(&compute_intersections(&layout).unwrap(), &profile);
            let motions = kinematics(&layout, &profile, &records);
            for m in &motions {
                let trip = profile.trip_ms(m.length);
                prop_assert!((m.tau_trip as f64 - trip).abs() < 1.0 + 1e-6);
                let mut windows: Vec<_> = m.points.iter()
                    .filter(|p| p.reach == Reach::Window)
                    .map(|p| {
                        let r = records.iter()
                            .find(|r| r.edge == m.edge && r.crossing == p.crossing)
                            .unwrap();
                        (r.d, p.tau_pass, p.tau_ret)
                    })
                    .collect();
                windows.sort_by(|a, b| a.0.total_cmp(&b.0));
                for w in windows.windows(2) {
                    prop_assert!(w[0].1 <= w[1].1 && w[0].2 >= w[1].2);
                }
                for &(d, tp, tr) in &windows {
                    prop_assert!(0 <= tp && tp <= tr && tr <= m.tau_trip);
                    let expected = 2.0 * profile.travel_ms(d - delta * m.length);
                    let got = (tp + (m.tau_trip - tr)) as f64;
                    prop_assert!((got - expected).abs() <= 2.0 + 1e-6);
                }
            }
        }
    }
}
