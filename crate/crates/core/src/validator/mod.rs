//! Continuous-time replay of schedules.
//!
//! Works from the intersection records and the morph profile with real-valued
//! stub timings, so grid rounding in the scheduler is checked against the
//! exact motion.

mod brute;
mod realset;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::geometry::{EdgeId, IntersectionRecord, MorphProfile, PointClass};
use crate::scheduler::{Instance, Schedule, ScheduleError};
use crate::timeline::Millis;

pub use brute::brute_force_forbidden;
pub use realset::RealSet;

/// Real timings within this distance of an integer ms are taken as exact.
const SNAP_MS: f64 = 1e-6;
/// Slack for ratio comparisons against δ and η.
const RATIO_SLACK: f64 = 1e-12;

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < SNAP_MS {
        r
    } else {
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Coverage {
    Always,
    Never,
    /// Covered during `[start + enter, start + leave)`.
    During {
        enter: f64,
        leave: f64,
    },
}

#[derive(Debug, Clone, Copy)]
struct Incidence<'a> {
    record: &'a IntersectionRecord,
    coverage: Coverage,
}

/// Real-valued stub motion of one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Tent {
    length: f64,
    rise: f64,
    trip: f64,
}

impl Tent {
    fn new(profile: &MorphProfile, length: f64) -> Tent {
        let rise = snap((profile.eta - profile.delta) * length * 1000.0 / profile.speed);
        Tent {
            length,
            rise,
            trip: snap(2.0 * rise + profile.pause as f64),
        }
    }

    fn coverage(&self, profile: &MorphProfile, record: &IntersectionRecord) -> Coverage {
        let ratio = record.s.min(1.0 - record.s);
        if ratio <= profile.delta + RATIO_SLACK {
            Coverage::Always
        } else if ratio > profile.eta + RATIO_SLACK {
            Coverage::Never
        } else {
            let enter = snap((ratio - profile.delta) * self.length * 1000.0 / profile.speed);
            Coverage::During {
                enter,
                leave: snap(self.trip - enter),
            }
        }
    }

    /// Stub ratio `u` ms after a morph start.
    fn ratio(&self, profile: &MorphProfile, u: f64) -> f64 {
        let per_ms = profile.speed / (1000.0 * self.length);
        if u < 0.0 || u >= self.trip {
            profile.delta
        } else if u < self.rise {
            profile.delta + u * per_ms
        } else if u < self.rise + profile.pause as f64 {
            profile.eta
        } else {
            profile.eta - (u - self.rise - profile.pause as f64) * per_ms
        }
    }
}

fn cover_set(c: Coverage, starts: &[f64]) -> RealSet {
    match c {
        Coverage::Always => RealSet::universe(),
        Coverage::Never => RealSet::empty(),
        Coverage::During { enter, leave } => {
            RealSet::from_intervals(starts.iter().map(|s| (s + enter, s + leave)))
        }
    }
}

fn profile_of(inst: &Instance, schedule: &Schedule) -> MorphProfile {
    schedule.profile.unwrap_or(inst.profile)
}

/// Stub ratio of `edge` at time `t`, replaying the edge's group with its cycle.
pub fn stub_ratio_at(inst: &Instance, schedule: &Schedule, edge: EdgeId, t: f64) -> f64 {
    let profile = profile_of(inst, schedule);
    let tent = Tent::new(&profile, inst.layout.edge_length(edge));
    let cycle = schedule.cycle_of(edge) as f64;
    let starts = schedule.starts.get(&edge).map(Vec::as_slice).unwrap_or(&[]);
    let mut ratio = profile.delta;
    for &s in starts {
        let s = s as f64;
        if t < s {
            continue;
        }
        // only the latest copies can still be running
        let mut j = if cycle > 0.0 {
            ((t - s) / cycle).floor()
        } else {
            0.0
        };
        while j >= 0.0 {
            let u = t - (s + j * cycle);
            if u >= tent.trip {
                break;
            }
            ratio = ratio.max(tent.ratio(&profile, u));
            if cycle <= 0.0 {
                break;
            }
            j -= 1.0;
        }
    }
    ratio
}

/// Crossing periods `X(q)` for one replay of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingTimeline {
    pub points: Vec<CrossingPeriod>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingPeriod {
    pub crossing: usize,
    pub edges: (EdgeId, EdgeId),
    pub class: PointClass,
    /// Always-crossing points are covered at all times and never counted.
    pub flagged: bool,
    pub period: RealSet,
}

/// One replay window of a group.
#[derive(Debug, Clone)]
struct Replay {
    edges: Vec<EdgeId>,
    /// Starts including periodic copies.
    starts: HashMap<EdgeId, Vec<f64>>,
    window: (f64, f64),
}

fn replays(
    inst: &Instance,
    schedule: &Schedule,
    cycles: usize,
) -> Result<Vec<Replay>, ScheduleError> {
    let groups: Vec<(Vec<EdgeId>, Millis, Millis)> = if schedule.groups.is_empty() {
        vec![(
            inst.layout.edges().iter().map(|e| e.id).collect(),
            schedule.t_total,
            schedule.t_cycle,
        )]
    } else {
        schedule
            .groups
            .iter()
            .map(|g| (g.edges.clone(), g.t_total, g.t_cycle))
            .collect()
    };
    let mut owner = HashMap::new();
    for (i, (edges, _, _)) in groups.iter().enumerate() {
        for e in edges {
            if inst.layout.edge(*e).is_none() {
                return Err(ScheduleError::Mismatch(format!("unknown edge {e}")));
            }
            owner.insert(*e, i);
        }
    }
    for e in inst.layout.edges() {
        if !owner.contains_key(&e.id) {
            return Err(ScheduleError::Mismatch(format!(
                "edge {} has no group",
                e.id
            )));
        }
    }
    for r in &inst.records {
        if owner[&r.edge] != owner[&r.opposite] {
            return Err(ScheduleError::Mismatch(format!(
                "crossing edges {} and {} repeat in different groups",
                r.edge, r.opposite
            )));
        }
    }
    groups
        .into_iter()
        .map(|(edges, total, cycle)| {
            if cycle <= 0 || cycle > total.max(1) {
                return Err(ScheduleError::Mismatch(format!(
                    "cycle {cycle} outside (0, {total}]"
                )));
            }
            let copies = (total + cycle - 1) / cycle;
            let last = copies + cycles as Millis - 1;
            let starts = edges
                .iter()
                .map(|e| {
                    let own = schedule.starts.get(e).map(Vec::as_slice).unwrap_or(&[]);
                    let all = (0..=last)
                        .flat_map(|j| own.iter().map(move |&s| (s + j * cycle) as f64))
                        .collect();
                    (*e, all)
                })
                .collect();
            Ok(Replay {
                edges,
                starts,
                window: (
                    (copies * cycle) as f64,
                    ((copies + cycles as Millis) * cycle) as f64,
                ),
            })
        })
        .collect()
}

fn incidences<'a>(
    inst: &'a Instance,
    profile: &MorphProfile,
) -> HashMap<EdgeId, Vec<Incidence<'a>>> {
    let mut out: HashMap<EdgeId, Vec<Incidence<'a>>> = HashMap::new();
    for r in &inst.records {
        let tent = Tent::new(profile, inst.layout.edge_length(r.edge));
        out.entry(r.edge).or_default().push(Incidence {
            record: r,
            coverage: tent.coverage(profile, r),
        });
    }
    out
}

/// Crossing periods over the first `cycles` steady-state periods of the
/// replay (plus the warm-up before them).
pub fn crossing_timeline(
    inst: &Instance,
    schedule: &Schedule,
    cycles: usize,
) -> Result<CrossingTimeline, ScheduleError> {
    let profile = profile_of(inst, schedule);
    let inc = incidences(inst, &profile);
    let mut starts = HashMap::new();
    for rp in replays(inst, schedule, cycles)? {
        starts.extend(rp.starts);
    }
    let coverage_of = |edge: EdgeId, crossing: usize| {
        inc[&edge]
            .iter()
            .find(|i| i.record.crossing == crossing)
            .expect("paired record")
            .coverage
    };
    let mut points = Vec::new();
    for pair in inst.records.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let ca = cover_set(coverage_of(a.edge, a.crossing), &starts[&a.edge]);
        let cb = cover_set(coverage_of(b.edge, b.crossing), &starts[&b.edge]);
        points.push(CrossingPeriod {
            crossing: a.crossing,
            edges: (a.edge, b.edge),
            class: a.class,
            flagged: a.class == PointClass::AlwaysCrossing,
            period: ca.intersect(&cb),
        });
    }
    Ok(CrossingTimeline { points })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub edge: EdgeId,
    /// Controllable crossing number `k_n(e)`.
    pub k: u32,
    pub always_crossing: usize,
    /// Most simultaneous crossings at fully-avoidable points.
    pub max_fully: usize,
    /// Most simultaneous crossings at semi-avoidable points.
    pub max_semi: usize,
    /// Most simultaneous counted crossings of either kind.
    pub max_counted: usize,
    /// Total counted crossing time per steady-state window, ms.
    pub crossing_ms: f64,
    pub self_overlap_ms: f64,
    pub violations: Vec<(f64, f64)>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub allow: u32,
    pub cycles: usize,
    pub edges: Vec<EdgeReport>,
    /// Problems with the schedule itself (negative starts, morphs past the
    /// total time, cycle longer than total).
    pub errors: Vec<String>,
    pub max_crossings: usize,
    pub max_fully: usize,
    pub valid: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Replays `schedule` periodically and checks every edge at every instant of
/// one steady-state cycle.
pub fn validate(
    inst: &Instance,
    schedule: &Schedule,
    allow: u32,
) -> Result<ValidationReport, ScheduleError> {
    validate_cycles(inst, schedule, allow, 1)
}

/// As [`validate`] over `cycles` consecutive steady-state cycles.
///
/// An edge with controllable number `k` fails at instants where more than `k`
/// fully-avoidable points cross, or where at least one crossing is not driven
/// by the edge itself and more than `max(k, 1)` points cross in total. A
/// semi-avoidable point is driven by the edge when the opposite edge always
/// passes it.
pub fn validate_cycles(
    inst: &Instance,
    schedule: &Schedule,
    allow: u32,
    cycles: usize,
) -> Result<ValidationReport, ScheduleError> {
    assert!(cycles >= 1);
    let profile = profile_of(inst, schedule);
    let inc = incidences(inst, &profile);
    let mut errors = Vec::new();
    let group_total: BTreeMap<EdgeId, Millis> = schedule
        .groups
        .iter()
        .flat_map(|g| g.edges.iter().map(move |&e| (e, g.t_total)))
        .collect();
    for (&e, starts) in &schedule.starts {
        if inst.layout.edge(e).is_none() {
            return Err(ScheduleError::Mismatch(format!("unknown edge {e}")));
        }
        let trip = Tent::new(&profile, inst.layout.edge_length(e)).trip;
        let total = group_total.get(&e).copied().unwrap_or(schedule.t_total) as f64;
        for &s in starts {
            if s < 0 {
                errors.push(format!("edge {e} starts at {s} < 0"));
            }
            if s as f64 + trip > total {
                errors.push(format!("edge {e} morph at {s} ends after {total}"));
            }
        }
    }
    if schedule.t_cycle > schedule.t_total {
        errors.push(format!(
            "cycle {} exceeds total {}",
            schedule.t_cycle, schedule.t_total
        ));
    }

    let mut edges = Vec::new();
    for rp in replays(inst, schedule, cycles)? {
        let window = RealSet::from_intervals([rp.window]);
        for &e in &rp.edges {
            let tent = Tent::new(&profile, inst.layout.edge_length(e));
            let own = &rp.starts[&e];
            let always_crossing = inc.get(&e).map_or(0, |v| {
                v.iter()
                    .filter(|i| i.record.class == PointClass::AlwaysCrossing)
                    .count()
            });
            let k = allow.saturating_sub(always_crossing as u32);
            let mut fully = Vec::new();
            let mut semi = Vec::new();
            let mut hard = Vec::new();
            for i in inc.get(&e).map(Vec::as_slice).unwrap_or(&[]) {
                let r = i.record;
                if r.class == PointClass::AlwaysCrossing {
                    continue;
                }
                let opp = inc[&r.opposite]
                    .iter()
                    .find(|o| o.record.crossing == r.crossing)
                    .expect("paired record");
                let x = cover_set(i.coverage, own)
                    .intersect(&cover_set(opp.coverage, &rp.starts[&r.opposite]))
                    .intersect(&window);
                if x.is_empty() {
                    continue;
                }
                match r.class {
                    PointClass::FullyAvoidable => {
                        hard.push(x.clone());
                        fully.push(x);
                    }
                    _ => {
                        if i.coverage == Coverage::Always {
                            hard.push(x.clone());
                        }
                        semi.push(x);
                    }
                }
            }
            let all: Vec<&RealSet> = fully.iter().chain(&semi).collect();
            let kk = k as usize;
            let bad = RealSet::depth_at_least(&fully, kk + 1).union(
                &RealSet::depth_at_least(&hard, 1)
                    .intersect(&RealSet::depth_at_least(all.iter().copied(), kk.max(1) + 1)),
            );
            let morphs: Vec<RealSet> = own
                .iter()
                .map(|&s| RealSet::from_intervals([(s, s + tent.trip)]))
                .collect();
            let overlap = RealSet::depth_at_least(&morphs, 2).intersect(&window);
            let ok = bad.is_empty() && overlap.is_empty();
            edges.push(EdgeReport {
                edge: e,
                k,
                always_crossing,
                max_fully: RealSet::max_depth(&fully),
                max_semi: RealSet::max_depth(&semi),
                max_counted: RealSet::max_depth(all.iter().copied()),
                crossing_ms: RealSet::depth_at_least(all.iter().copied(), 1).measure(),
                self_overlap_ms: overlap.measure(),
                violations: bad.spans().to_vec(),
                ok,
            });
        }
    }
    edges.sort_by_key(|r| r.edge);
    let valid = errors.is_empty() && edges.iter().all(|r| r.ok);
    Ok(ValidationReport {
        allow,
        cycles,
        max_crossings: edges.iter().map(|r| r.max_counted).max().unwrap_or(0),
        max_fully: edges.iter().map(|r| r.max_fully).max().unwrap_or(0),
        edges,
        errors,
        valid,
    })
}

#[cfg(test)]
mod tests;
