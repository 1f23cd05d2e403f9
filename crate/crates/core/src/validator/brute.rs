use std::collections::{BTreeMap, HashMap};

use crate::geometry::{EdgeId, PointClass, PointMotion, Reach, StubMotion};
use crate::scheduler::{ForbiddenLevel, Instance};
use crate::timeline::{Millis, TimePeriod};

/// Boolean timeline on `[lo, lo + len)` with prefix sums for range queries.
struct Track {
    lo: Millis,
    on: Vec<bool>,
    prefix: Vec<u32>,
}

impl Track {
    fn new(lo: Millis, on: Vec<bool>) -> Track {
        let mut prefix = Vec::with_capacity(on.len() + 1);
        prefix.push(0);
        for &b in &on {
            prefix.push(prefix.last().unwrap() + u32::from(b));
        }
        Track { lo, on, prefix }
    }

    fn at(&self, u: Millis) -> bool {
        self.on[(u - self.lo) as usize]
    }

    /// Any instant of `[a, b)` set.
    fn any(&self, a: Millis, b: Millis) -> bool {
        let (a, b) = ((a - self.lo) as usize, (b - self.lo) as usize);
        self.prefix[b] > self.prefix[a]
    }
}

struct Sim<'a> {
    lo: Millis,
    len: usize,
    motions: HashMap<EdgeId, &'a StubMotion>,
    starts: &'a BTreeMap<EdgeId, Vec<Millis>>,
}

impl<'a> Sim<'a> {
    fn point(&self, edge: EdgeId, crossing: usize) -> &'a PointMotion {
        self.motions[&edge].point(crossing).expect("paired record")
    }

    /// Passing instants of `edge` at `crossing` on the grid.
    fn pass(&self, edge: EdgeId, crossing: usize) -> Vec<bool> {
        let p = self.point(edge, crossing);
        match p.reach {
            Reach::Always => vec![true; self.len],
            Reach::Never => vec![false; self.len],
            Reach::Window => {
                let mut on = vec![false; self.len];
                for &s in self.starts.get(&edge).map(Vec::as_slice).unwrap_or(&[]) {
                    for u in s + p.tau_pass..s + p.tau_ret {
                        if let Some(slot) =
                            u.checked_sub(self.lo).and_then(|i| on.get_mut(i as usize))
                        {
                            *slot = true;
                        }
                    }
                }
                on
            }
        }
    }

    fn crossing(&self, edge: EdgeId, crossing: usize) -> Vec<bool> {
        let opp = self.point(edge, crossing).opposite;
        let a = self.pass(edge, crossing);
        let b = self.pass(opp, crossing);
        a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
    }

    /// Instants at which `o`'s own allowance is at risk at `crossing`.
    fn opposite_critical(&self, o: EdgeId, crossing: usize, allow: u32) -> Vec<bool> {
        let m = self.motions[&o];
        let k = allow.saturating_sub(m.always_crossing_count() as u32) as usize;
        if k == 0 && self.point(o, crossing).reach != Reach::Always {
            return self.pass(o, crossing);
        }
        let need = k.max(1);
        let xs: Vec<Vec<bool>> = m
            .points
            .iter()
            .filter(|q| q.class != PointClass::AlwaysCrossing)
            .map(|q| self.crossing(o, q.crossing))
            .collect();
        (0..self.len)
            .map(|u| xs.iter().filter(|x| x[u]).count() >= need)
            .collect()
    }
}

/// Forbidden start times of `edge` in `[-horizon, horizon)`, found by trying
/// every start and testing the level's condition directly on the ms grid.
///
/// A stub at a point counts from entering up to and including the moment it
/// leaves, matching the scheduler's conservative boundary convention.
pub fn brute_force_forbidden(
    inst: &Instance,
    starts: &BTreeMap<EdgeId, Vec<Millis>>,
    edge: EdgeId,
    level: ForbiddenLevel,
    horizon: Millis,
) -> TimePeriod {
    let motions: HashMap<EdgeId, &StubMotion> = inst.motions.iter().map(|m| (m.edge, m)).collect();
    let me = motions[&edge];
    let max_trip = inst.motions.iter().map(|m| m.tau_trip).max().unwrap_or(0);
    let reach = starts
        .values()
        .flatten()
        .map(|s| s.abs())
        .max()
        .unwrap_or(0);
    let cycle = match level {
        ForbiddenLevel::Cycle(c) | ForbiddenLevel::Allowance { cycle: c, .. } => c,
        _ => 0,
    };
    let lo = -horizon - cycle - reach - 2 * max_trip - 2;
    let hi = horizon + reach + 2 * max_trip + 2;
    let sim = Sim {
        lo,
        len: (hi - lo) as usize,
        motions,
        starts,
    };
    let own_starts = starts.get(&edge).map(Vec::as_slice).unwrap_or(&[]);
    let reachable: Vec<&PointMotion> = me
        .points
        .iter()
        .filter(|p| p.reach != Reach::Never)
        .collect();
    let opp_pass: Vec<Track> = reachable
        .iter()
        .map(|p| Track::new(lo, sim.pass(p.opposite, p.crossing)))
        .collect();
    let opp_always: Vec<bool> = reachable
        .iter()
        .map(|p| sim.point(p.opposite, p.crossing).reach == Reach::Always)
        .collect();
    // closed on the right
    let window = |t: Millis, p: &PointMotion| (t + p.tau_pass, t + p.tau_ret + 1);

    let meets = |t: Millis, i: usize| {
        let (a, b) = window(t, reachable[i]);
        opp_pass[i].any(a, b)
    };
    let basic = |t: Millis| (0..reachable.len()).any(|i| meets(t, i));
    // the candidate morph is closed on the right, existing ones half-open
    let overlaps_self = |t: Millis| {
        own_starts
            .iter()
            .any(|&s| -me.tau_trip <= t - s && t - s < me.tau_trip)
    };
    let with_self = |t: Millis| basic(t) || overlaps_self(t);

    // some instant where at least `need` chosen points are met at once, not
    // all of them by an opposite stub that is always there
    let crowded = |t: Millis, chosen: &[usize], need: usize| {
        if chosen.len() < need {
            return false;
        }
        let a = chosen
            .iter()
            .map(|&i| window(t, reachable[i]).0)
            .min()
            .unwrap();
        let b = chosen
            .iter()
            .map(|&i| window(t, reachable[i]).1)
            .max()
            .unwrap();
        (a..b).any(|u| {
            let active: Vec<usize> = chosen
                .iter()
                .copied()
                .filter(|&i| {
                    let (wa, wb) = window(t, reachable[i]);
                    wa <= u && u < wb && opp_pass[i].at(u)
                })
                .collect();
            active.len() >= need && active.iter().any(|&i| !opp_always[i])
        })
    };

    let allow = match level {
        ForbiddenLevel::Allowance { allow, .. } => allow,
        _ => 0,
    };
    let k = allow.saturating_sub(me.always_crossing_count() as u32) as usize;
    let semi: Vec<usize> = (0..reachable.len())
        .filter(|&i| reachable[i].class == PointClass::SemiAvoidable)
        .collect();
    let counted: Vec<usize> = (0..reachable.len())
        .filter(|&i| reachable[i].class != PointClass::AlwaysCrossing)
        .collect();
    let guarded: Vec<usize> = (0..reachable.len()).filter(|&i| !opp_always[i]).collect();
    let crit = |t: Millis| {
        if k == 0 {
            guarded.iter().any(|&i| meets(t, i)) || crowded(t, &semi, 2)
        } else {
            crowded(t, &counted, k + 1)
        }
    };
    let critical: Vec<(&PointMotion, Track)> = if matches!(level, ForbiddenLevel::Allowance { .. })
    {
        me.points
            .iter()
            .filter(|p| p.reach == Reach::Window)
            .map(|p| {
                (
                    p,
                    Track::new(lo, sim.opposite_critical(p.opposite, p.crossing, allow)),
                )
            })
            .collect()
    } else {
        Vec::new()
    };
    let opst = |t: Millis| {
        critical.iter().any(|(p, track)| {
            let (a, b) = window(t, p);
            track.any(a, b)
        })
    };
    let allowance = |t: Millis| crit(t) || overlaps_self(t) || opst(t);

    let forbidden = |t: Millis| match level {
        ForbiddenLevel::Basic => basic(t),
        ForbiddenLevel::SelfAvoiding => with_self(t),
        ForbiddenLevel::Cycle(c) => with_self(t) || with_self(t - c),
        ForbiddenLevel::Allowance { cycle, .. } => allowance(t) || allowance(t - cycle),
    };
    TimePeriod::from_intervals(
        (-horizon..horizon)
            .filter(|&t| forbidden(t))
            .map(|t| (t, t + 1)),
    )
}
