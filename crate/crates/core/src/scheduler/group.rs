use std::cell::RefCell;
use std::collections::HashMap;

use crate::geometry::{EdgeId, PointClass, Reach, StubMotion};
use crate::timeline::{Millis, TimePeriod};

/// One crossing point as seen from a group edge, with local indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupPoint {
    pub crossing: usize,
    /// Local index of the opposite edge.
    pub opposite: usize,
    /// Index of the same crossing in the opposite edge's point list.
    pub mirror: usize,
    pub class: PointClass,
    pub reach: Reach,
    pub opposite_reach: Reach,
    pub tau_pass: Millis,
    pub tau_ret: Millis,
}

impl GroupPoint {
    pub fn counts(&self) -> bool {
        self.class != PointClass::AlwaysCrossing
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupEdge {
    pub id: EdgeId,
    pub length: f64,
    pub tau_trip: Millis,
    pub points: Vec<GroupPoint>,
    pub always_crossing: usize,
}

/// Edges whose timings constrain each other, re-indexed locally.
#[derive(Debug, Clone)]
pub struct MorphGroup {
    edges: Vec<GroupEdge>,
    index: HashMap<EdgeId, usize>,
}

impl MorphGroup {
    /// Builds the group for `ids`. Every opposite edge of a member must be a
    /// member too, which holds for the output of `morphing_groups`.
    pub fn new(ids: &[EdgeId], motions: &[StubMotion]) -> MorphGroup {
        let by_id: HashMap<EdgeId, &StubMotion> = motions.iter().map(|m| (m.edge, m)).collect();
        let index: HashMap<EdgeId, usize> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let edges = ids
            .iter()
            .map(|id| {
                let m = by_id[id];
                let points = m
                    .points
                    .iter()
                    .map(|p| {
                        let opp = by_id[&p.opposite];
                        let mirror = opp
                            .points
                            .iter()
                            .position(|q| q.crossing == p.crossing)
                            .expect("crossing recorded on both edges");
                        GroupPoint {
                            crossing: p.crossing,
                            opposite: *index
                                .get(&p.opposite)
                                .expect("opposite edge belongs to the same group"),
                            mirror,
                            class: p.class,
                            reach: p.reach,
                            opposite_reach: opp.points[mirror].reach,
                            tau_pass: p.tau_pass,
                            tau_ret: p.tau_ret,
                        }
                    })
                    .collect();
                GroupEdge {
                    id: m.edge,
                    length: m.length,
                    tau_trip: m.tau_trip,
                    points,
                    always_crossing: m.always_crossing_count(),
                }
            })
            .collect();
        MorphGroup { edges, index }
    }

    pub fn edges(&self) -> &[GroupEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn local(&self, id: EdgeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// `k_n(e) = max(0, n - #always-crossing points on e)`.
    pub fn controllable(&self, e: usize, n: u32) -> u32 {
        controllable_number(self.edges[e].always_crossing, n)
    }
}

pub fn controllable_number(always_crossing: usize, n: u32) -> u32 {
    n.saturating_sub(u32::try_from(always_crossing).unwrap_or(u32::MAX))
}

/// Which forbidden start period to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForbiddenLevel {
    /// Crossings with scheduled opposite edges only.
    Basic,
    /// Plus overlap with the edge's own morphs.
    SelfAvoiding,
    /// `SelfAvoiding` widened by one cycle.
    Cycle(Millis),
    /// Bounded simultaneous crossings, widened by `cycle` (0 if undetermined).
    Allowance { cycle: Millis, allow: u32 },
}

#[derive(Debug, Clone)]
struct OppositeSummary {
    allow: u32,
    /// Union of crossing periods over counted points.
    any: TimePeriod,
    /// Instants with more than `k_n` counted crossings (equals `any` for `k_n = 0`).
    deep: TimePeriod,
}

/// Partial schedule of one group plus derived passing and crossing periods.
#[derive(Debug, Clone)]
pub struct GroupState<'g> {
    group: &'g MorphGroup,
    starts: Vec<Vec<Millis>>,
    pass: Vec<Vec<TimePeriod>>,
    cross: Vec<Vec<TimePeriod>>,
    summary: RefCell<Vec<Option<OppositeSummary>>>,
}

impl<'g> GroupState<'g> {
    pub fn new(group: &'g MorphGroup) -> Self {
        Self::with_starts(group, vec![Vec::new(); group.len()])
    }

    pub fn with_starts(group: &'g MorphGroup, mut starts: Vec<Vec<Millis>>) -> Self {
        assert_eq!(starts.len(), group.len());
        for s in &mut starts {
            s.sort_unstable();
            s.dedup();
        }
        let pass: Vec<Vec<TimePeriod>> = group
            .edges
            .iter()
            .zip(&starts)
            .map(|(e, s)| e.points.iter().map(|p| point_pass(p, s)).collect())
            .collect();
        let cross = group
            .edges
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                (0..edge.points.len())
                    .map(|i| {
                        let p = &edge.points[i];
                        pass[e][i].intersect(&pass[p.opposite][p.mirror])
                    })
                    .collect()
            })
            .collect();
        GroupState {
            group,
            starts,
            pass,
            cross,
            summary: RefCell::new(vec![None; group.len()]),
        }
    }

    pub fn group(&self) -> &'g MorphGroup {
        self.group
    }

    pub fn starts(&self, e: usize) -> &[Millis] {
        &self.starts[e]
    }

    pub fn all_starts(&self) -> &[Vec<Millis>] {
        &self.starts
    }

    /// `C^e_p` for point `i` of edge `e`.
    pub fn pass(&self, e: usize, i: usize) -> &TimePeriod {
        &self.pass[e][i]
    }

    /// `X(q)` for point `i` of edge `e`.
    pub fn crossing(&self, e: usize, i: usize) -> &TimePeriod {
        &self.cross[e][i]
    }

    /// `C^{e/p}_p`: passing period of the opposite edge at point `i` of `e`.
    pub fn opposite_pass(&self, e: usize, i: usize) -> &TimePeriod {
        let p = &self.group.edges[e].points[i];
        &self.pass[p.opposite][p.mirror]
    }

    pub fn add_start(&mut self, e: usize, t: Millis) {
        let pos = self.starts[e].binary_search(&t).unwrap_or_else(|p| p);
        if self.starts[e].get(pos) == Some(&t) {
            return;
        }
        self.starts[e].insert(pos, t);
        let edge = &self.group.edges[e];
        let mut summary = self.summary.borrow_mut();
        summary[e] = None;
        for (i, p) in edge.points.iter().enumerate() {
            if p.reach != Reach::Window {
                continue;
            }
            self.pass[e][i] = point_pass(p, &self.starts[e]);
            let x = self.pass[e][i].intersect(&self.pass[p.opposite][p.mirror]);
            self.cross[p.opposite][p.mirror] = x.clone();
            self.cross[e][i] = x;
            summary[p.opposite] = None;
        }
    }

    pub fn forbidden(&self, e: usize, level: ForbiddenLevel) -> TimePeriod {
        match level {
            ForbiddenLevel::Basic => self.forbidden_basic(e),
            ForbiddenLevel::SelfAvoiding => self.forbidden_with_self(e),
            ForbiddenLevel::Cycle(c) => self.forbidden_cycle(e, c),
            ForbiddenLevel::Allowance { cycle, allow } => self.forbidden_allowance(e, cycle, allow),
        }
    }

    /// `P_crit^(1)`: starts at which `e` meets a scheduled opposite stub.
    pub fn forbidden_basic(&self, e: usize) -> TimePeriod {
        let edge = &self.group.edges[e];
        let parts: Vec<TimePeriod> = edge
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.reach != Reach::Never)
            .map(|(i, p)| self.opposite_pass(e, i).shift_window(p.tau_pass, p.tau_ret))
            .collect();
        TimePeriod::union_all(&parts)
    }

    /// `P_self`: starts whose morph would overlap one of the edge's own morphs.
    pub fn self_period(&self, e: usize) -> TimePeriod {
        let trip = self.group.edges[e].tau_trip;
        TimePeriod::from_intervals(self.starts[e].iter().map(|&t| (t - trip, t + trip)))
    }

    pub fn forbidden_with_self(&self, e: usize) -> TimePeriod {
        self.forbidden_basic(e).union(&self.self_period(e))
    }

    pub fn forbidden_cycle(&self, e: usize, cycle: Millis) -> TimePeriod {
        self.forbidden_with_self(e).widen_cycle(cycle)
    }

    pub fn forbidden_allowance(&self, e: usize, cycle: Millis, allow: u32) -> TimePeriod {
        let k = self.group.controllable(e, allow);
        self.crit_allowance(e, k)
            .union(&self.self_period(e))
            .union(&self.opst_allowance(e, allow))
            .widen_cycle(cycle)
    }

    /// `P_crit^(2)(e, k)`: starts at which more than `k` controllable
    /// crossings would coincide on `e`.
    pub fn crit_allowance(&self, e: usize, k: u32) -> TimePeriod {
        let edge = &self.group.edges[e];
        let reachable = |p: &GroupPoint| p.reach != Reach::Never;
        if k == 0 {
            let single: Vec<TimePeriod> = edge
                .points
                .iter()
                .enumerate()
                .filter(|(i, p)| reachable(p) && !self.opposite_pass(e, *i).is_universe())
                .map(|(i, p)| self.opposite_pass(e, i).shift_window(p.tau_pass, p.tau_ret))
                .collect();
            let semi = self.candidates(e, |p| p.class == PointClass::SemiAvoidable);
            TimePeriod::union_all(&single).union(&nested_subsets(semi, 1))
        } else {
            let cands = self.candidates(e, |p| p.counts());
            nested_subsets(cands, k as usize)
        }
    }

    fn candidates(&self, e: usize, keep: impl Fn(&GroupPoint) -> bool) -> Vec<Candidate<'_>> {
        self.group.edges[e]
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.reach != Reach::Never && keep(p))
            .map(|(i, p)| Candidate {
                tau_pass: p.tau_pass,
                tau_ret: p.tau_ret,
                period: self.opposite_pass(e, i),
            })
            .collect()
    }

    /// `P_opst(e, n)`: starts at which `e` would push an opposite edge over
    /// its own allowance.
    pub fn opst_allowance(&self, e: usize, allow: u32) -> TimePeriod {
        let edge = &self.group.edges[e];
        let mut parts = Vec::new();
        for p in edge.points.iter().filter(|p| p.reach == Reach::Window) {
            let o = p.opposite;
            let critical = if self.group.controllable(o, allow) == 0 {
                if p.opposite_reach == Reach::Always {
                    self.summary(o, allow).any
                } else {
                    self.pass[o][p.mirror].clone()
                }
            } else {
                self.summary(o, allow).deep
            };
            parts.push(critical.shift_window(p.tau_pass, p.tau_ret));
        }
        TimePeriod::union_all(&parts)
    }

    fn summary(&self, e: usize, allow: u32) -> OppositeSummary {
        if let Some(s) = &self.summary.borrow()[e] {
            if s.allow == allow {
                return s.clone();
            }
        }
        let edge = &self.group.edges[e];
        let xs: Vec<&TimePeriod> = edge
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.counts())
            .map(|(i, _)| &self.cross[e][i])
            .collect();
        let any = TimePeriod::union_all(xs.iter().copied());
        let k = self.group.controllable(e, allow) as usize;
        let deep = if k == 0 {
            any.clone()
        } else {
            TimePeriod::depth_at_least(xs.iter().copied(), k)
        };
        let s = OppositeSummary { allow, any, deep };
        self.summary.borrow_mut()[e] = Some(s.clone());
        s
    }
}

fn point_pass(p: &GroupPoint, starts: &[Millis]) -> TimePeriod {
    match p.reach {
        Reach::Always => TimePeriod::universe(),
        Reach::Never => TimePeriod::empty(),
        Reach::Window => {
            TimePeriod::from_intervals(starts.iter().map(|&t| (t + p.tau_pass, t + p.tau_ret)))
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Candidate<'a> {
    pub tau_pass: Millis,
    pub tau_ret: Millis,
    pub period: &'a TimePeriod,
}

/// Union over subsets `Q` of `others + 1` candidates of `∩_{p∈Q} S_p(O(Q))`,
/// skipping subsets whose common period `O(Q)` is the universe.
///
/// Windows on one edge are nested, so the intersection over `Q` is the shift
/// by its innermost window. Each candidate is taken as the innermost member in
/// turn, with the rest chosen among the candidates enclosing it.
pub(crate) fn nested_subsets(mut cands: Vec<Candidate<'_>>, others: usize) -> TimePeriod {
    cands.retain(|c| !c.period.is_empty());
    cands.sort_by(|a, b| b.tau_pass.cmp(&a.tau_pass).then(a.tau_ret.cmp(&b.tau_ret)));
    let mut parts = Vec::new();
    for (i, inner) in cands.iter().enumerate() {
        let outer = &cands[i + 1..];
        if outer.len() < others {
            break;
        }
        let common = if inner.period.is_universe() {
            let universes = outer.iter().filter(|c| c.period.is_universe()).count();
            let finite: Vec<&TimePeriod> = outer
                .iter()
                .filter(|c| !c.period.is_universe())
                .map(|c| c.period)
                .collect();
            let need = others.saturating_sub(universes).max(1);
            if finite.len() < need {
                continue;
            }
            TimePeriod::depth_at_least(finite, need)
        } else {
            inner.period.intersect(&TimePeriod::depth_at_least(
                outer.iter().map(|c| c.period),
                others,
            ))
        };
        parts.push(common.shift_window(inner.tau_pass, inner.tau_ret));
    }
    TimePeriod::union_all(&parts)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Literal subset enumeration of `nested_subsets`.
    pub(crate) fn naive_subsets(cands: &[Candidate<'_>], others: usize) -> TimePeriod {
        let n = cands.len();
        let mut out = TimePeriod::empty();
        if n > 20 {
            panic!("too many candidates for enumeration");
        }
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != others + 1 {
                continue;
            }
            let q: Vec<&Candidate<'_>> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| &cands[i])
                .collect();
            let common = q
                .iter()
                .fold(TimePeriod::universe(), |acc, c| acc.intersect(c.period));
            if common.is_universe() {
                continue;
            }
            let hit = q.iter().fold(TimePeriod::universe(), |acc, c| {
                acc.intersect(&common.shift_window(c.tau_pass, c.tau_ret))
            });
            out = out.union(&hit);
        }
        out
    }

    #[test]
    fn controllable_examples() {
        assert_eq!(controllable_number(5, 0), 0);
        assert_eq!(controllable_number(1, 3), 2);
        assert_eq!(controllable_number(2, 1), 0);
    }

    #[test]
    fn nested_matches_naive_on_fixed_case() {
        let a = TimePeriod::interval(0, 100);
        let b = TimePeriod::interval(50, 150);
        let u = TimePeriod::universe();
        let e = TimePeriod::empty();
        let cands = vec![
            Candidate {
                tau_pass: 10,
                tau_ret: 90,
                period: &a,
            },
            Candidate {
                tau_pass: 20,
                tau_ret: 80,
                period: &b,
            },
            Candidate {
                tau_pass: 0,
                tau_ret: 100,
                period: &u,
            },
            Candidate {
                tau_pass: 30,
                tau_ret: 70,
                period: &e,
            },
            Candidate {
                tau_pass: 40,
                tau_ret: 60,
                period: &u,
            },
        ];
        for others in 1..4 {
            assert_eq!(
                nested_subsets(cands.clone(), others),
                naive_subsets(&cands, others),
                "others = {others}"
            );
        }
    }

    #[test]
    fn all_universe_subsets_are_skipped() {
        let u = TimePeriod::universe();
        let cands = vec![
            Candidate {
                tau_pass: 10,
                tau_ret: 90,
                period: &u,
            },
            Candidate {
                tau_pass: 20,
                tau_ret: 80,
                period: &u,
            },
        ];
        assert!(nested_subsets(cands, 1).is_empty());
    }
}
