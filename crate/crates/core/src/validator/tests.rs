use std::collections::BTreeMap;

use super::*;
use crate::geometry::{generate_circle_layout, Edge, GraphLayout, Node, NodeId};
use crate::scheduler::{ForbiddenLevel, GroupSchedule, SchedulerConfig, SortOrder};
use crate::timeline::TimePeriod;

fn profile(delta: f64) -> MorphProfile {
    MorphProfile::new(delta, 0.5, 100.0, 100).unwrap()
}

fn cross() -> Instance {
    let nodes = [(-100.0, 0.0), (100.0, 0.0), (0.0, -100.0), (0.0, 100.0)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Node {
            id: NodeId(i as u32),
            x,
            y,
        })
        .collect();
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
    Instance::new(GraphLayout::new(nodes, edges).unwrap(), profile(0.25)).unwrap()
}

fn circle(n: u32, delta: f64) -> Instance {
    Instance::new(generate_circle_layout(n, 200.0).unwrap(), profile(delta)).unwrap()
}

fn fixed(e1: Vec<Millis>, e2: Vec<Millis>, total: Millis, cycle: Millis, allow: u32) -> Schedule {
    Schedule {
        starts: BTreeMap::from([(EdgeId(1), e1), (EdgeId(2), e2)]),
        t_total: total,
        t_cycle: cycle,
        allow,
        controllable: BTreeMap::new(),
        groups: vec![GroupSchedule {
            edges: vec![EdgeId(1), EdgeId(2)],
            t_total: total,
            t_cycle: cycle,
        }],
        profile: None,
    }
}

#[test]
fn tent_values() {
    let inst = cross();
    let s = fixed(vec![0], vec![100], 1200, 1200, 0);
    let r = |t: f64| stub_ratio_at(&inst, &s, EdgeId(1), t);
    assert_eq!(r(0.0), 0.25);
    assert!((r(500.0) - 0.5).abs() < 1e-12);
    assert!((r(600.0) - 0.5).abs() < 1e-12);
    assert!((r(1100.0) - 0.25).abs() < 1e-12);
    assert!((r(250.0) - 0.375).abs() < 1e-12);
    assert_eq!(r(-10.0), 0.25);
    // next cycle
    assert!((r(1700.0) - 0.5).abs() < 1e-12);
}

#[test]
fn timeline_examples() {
    let inst = cross();
    let apart = crossing_timeline(&inst, &fixed(vec![0], vec![100], 1200, 1200, 0), 2).unwrap();
    assert!(apart.points.iter().all(|p| p.period.is_empty()));
    let together = crossing_timeline(&inst, &fixed(vec![0], vec![0], 1100, 1100, 1), 2).unwrap();
    let first = together.points[0]
        .period
        .intersect(&RealSet::from_intervals([(0.0, 1100.0)]));
    assert_eq!(first.spans(), &[(500.0, 600.0)]);

    let k13 = circle(13, 0.25);
    let s = k13.schedule(&SchedulerConfig::default()).unwrap();
    let tl = crossing_timeline(&k13, &s, 1).unwrap();
    let flagged: Vec<_> = tl.points.iter().filter(|p| p.flagged).collect();
    assert!(!flagged.is_empty());
    assert!(flagged.iter().all(|p| p.period.is_universe()));
}

#[test]
fn validate_examples() {
    let inst = cross();
    let basic = inst.schedule(&SchedulerConfig::default()).unwrap();
    let rep = validate(&inst, &basic, 0).unwrap();
    assert!(rep.valid);
    assert_eq!(rep.max_crossings, 0);

    let rep = validate(&inst, &fixed(vec![0], vec![0], 1100, 1100, 1), 1).unwrap();
    assert!(rep.valid);
    assert_eq!(rep.max_crossings, 1);

    let rep = validate(&inst, &fixed(vec![0], vec![0], 1100, 1100, 0), 0).unwrap();
    assert!(!rep.valid);
    assert_eq!(rep.max_crossings, 1);
    assert_eq!(rep.edges[0].violations, vec![(1600.0, 1700.0)]);
}

#[test]
fn catches_bad_cycles() {
    let inst = cross();
    // the second cycle starts while the first is still running
    let rep = validate(&inst, &fixed(vec![0], vec![100], 1200, 1000, 0), 0).unwrap();
    assert!(!rep.valid);
    assert!(rep.edges.iter().any(|e| e.self_overlap_ms > 0.0));
    let rep = validate(&inst, &fixed(vec![-5], vec![100], 1200, 1200, 0), 0).unwrap();
    assert!(!rep.errors.is_empty());
}

#[test]
fn overlap_schedule_replays_cleanly() {
    let inst = cross();
    let cfg = SchedulerConfig {
        overlap: true,
        ..SchedulerConfig::default()
    };
    let s = inst.schedule(&cfg).unwrap();
    assert_eq!(s.t_cycle, 1101);
    assert!(validate(&inst, &s, 0).unwrap().valid);
}

#[test]
fn periodic_replay_is_consistent() {
    let inst = circle(9, 0.16);
    for (overlap, duplicate, allow) in [(true, false, 0), (false, true, 2), (true, true, 4)] {
        let cfg = SchedulerConfig {
            order: SortOrder::Seeded(5),
            overlap,
            duplicate,
            allow,
        };
        let s = inst.schedule(&cfg).unwrap();
        let one = validate_cycles(&inst, &s, allow, 1).unwrap();
        let three = validate_cycles(&inst, &s, allow, 3).unwrap();
        assert!(one.valid, "{:?}", one.errors);
        assert_eq!(one.valid, three.valid);
        for (a, b) in one.edges.iter().zip(&three.edges) {
            assert_eq!(
                (a.max_fully, a.max_semi, a.max_counted),
                (b.max_fully, b.max_semi, b.max_counted)
            );
            assert!((3.0 * a.crossing_ms - b.crossing_ms).abs() < 1e-6);
        }
    }
}

#[test]
fn analytic_matches_sampling() {
    let inst = circle(7, 0.09);
    let cfg = SchedulerConfig {
        order: SortOrder::Ascending,
        overlap: true,
        duplicate: false,
        allow: 2,
    };
    let s = inst.schedule(&cfg).unwrap();
    let tl = crossing_timeline(&inst, &s, 2).unwrap();
    let horizon = (s.t_total + 2 * s.t_cycle) as f64;
    for p in tl.points.iter().take(12) {
        let (a, b) = p.edges;
        let ra = inst
            .records
            .iter()
            .find(|r| r.edge == a && r.crossing == p.crossing)
            .unwrap();
        let rb = inst
            .records
            .iter()
            .find(|r| r.edge == b && r.crossing == p.crossing)
            .unwrap();
        let mut t = 0.5;
        while t < horizon {
            let covered = |edge, ratio: f64| stub_ratio_at(&inst, &s, edge, t) >= ratio - 1e-12;
            let sampled = covered(a, ra.ratio()) && covered(b, rb.ratio());
            assert_eq!(
                sampled,
                p.period.contains(t),
                "crossing {} at {t}",
                p.crossing
            );
            t += 1.0;
        }
    }
}

#[test]
fn brute_force_examples() {
    let inst = cross();
    let starts = BTreeMap::from([(EdgeId(1), vec![0])]);
    assert_eq!(
        brute_force_forbidden(&inst, &starts, EdgeId(2), ForbiddenLevel::Basic, 3000),
        TimePeriod::interval(-100, 100)
    );
    let allowance = ForbiddenLevel::Allowance { cycle: 0, allow: 1 };
    assert!(brute_force_forbidden(&inst, &starts, EdgeId(2), allowance, 3000).is_empty());
    let k4 = circle(4, 0.25);
    let side = BTreeMap::from([(EdgeId(0), vec![0])]);
    assert!(brute_force_forbidden(&k4, &side, EdgeId(3), ForbiddenLevel::Basic, 2000).is_empty());
    assert_eq!(
        brute_force_forbidden(&k4, &side, EdgeId(0), ForbiddenLevel::Cycle(2000), 3000),
        TimePeriod::interval(-1515, 3000)
    );
}
