//! Morph start-time scheduling for a drawing, one morphing group at a time.

mod cycle;
mod group;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    classify_all, compute_intersections, kinematics, morphing_groups, EdgeId, GeometryError,
    GraphLayout, IntersectionRecord, MorphProfile, StubMotion,
};
use crate::timeline::Millis;

pub use cycle::{
    periodic_violation, repair_overlap_allowance, schedule_basic, schedule_duplication,
    schedule_serial, schedule_with_allowance, shorten_cycle, total_time,
};
pub use group::{
    controllable_number, ForbiddenLevel, GroupEdge, GroupPoint, GroupState, MorphGroup,
};

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("no feasible start time for edge {0}")]
    NoFeasibleTime(EdgeId),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("schedule does not fit the layout: {0}")]
    Mismatch(String),
    #[error("bad sort order {0:?}; expected desc, asc or seed:K")]
    BadOrder(String),
}

/// Order in which edges are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SortOrder {
    /// Longest first; equal lengths by edge id.
    Descending,
    /// Shortest first; equal lengths by edge id.
    Ascending,
    /// ChaCha8 shuffle of the edge ids.
    Seeded(u64),
}

impl fmt::Display for SortOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SortOrder::Descending => f.write_str("desc"),
            SortOrder::Ascending => f.write_str("asc"),
            SortOrder::Seeded(k) => write!(f, "seed:{k}"),
        }
    }
}

impl FromStr for SortOrder {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desc" => Ok(SortOrder::Descending),
            "asc" => Ok(SortOrder::Ascending),
            _ => s
                .strip_prefix("seed:")
                .and_then(|k| k.parse().ok())
                .map(SortOrder::Seeded)
                .ok_or_else(|| ScheduleError::BadOrder(s.to_string())),
        }
    }
}

impl SortOrder {
    /// Orders `edges` given as `(id, length)` pairs.
    pub fn arrange(&self, edges: &[(EdgeId, f64)]) -> Vec<EdgeId> {
        // lengths of symmetric chords differ in the last bits; compare at 1e-6 px
        let key = |len: f64| (len * 1e6).round() as i64;
        let mut v: Vec<(EdgeId, f64)> = edges.to_vec();
        match self {
            SortOrder::Descending => v.sort_by_key(|&(id, len)| (-key(len), id)),
            SortOrder::Ascending => v.sort_by_key(|&(id, len)| (key(len), id)),
            SortOrder::Seeded(seed) => {
                v.sort_by_key(|&(id, _)| id);
                v.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            }
        }
        v.into_iter().map(|(id, _)| id).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    pub order: SortOrder,
    /// Shorten the repetition cycle by overlapping consecutive cycles.
    pub overlap: bool,
    /// Add extra morphs within one cycle.
    pub duplicate: bool,
    /// Allowable simultaneous crossings per edge.
    pub allow: u32,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            order: SortOrder::Descending,
            overlap: false,
            duplicate: false,
            allow: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSchedule {
    pub edges: Vec<EdgeId>,
    pub t_total: Millis,
    pub t_cycle: Millis,
}

/// Start times of every edge of a drawing. Groups repeat independently with
/// their own cycle; the drawing-level values are the maxima over groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(rename = "edges")]
    pub starts: BTreeMap<EdgeId, Vec<Millis>>,
    pub t_total: Millis,
    pub t_cycle: Millis,
    #[serde(rename = "n")]
    pub allow: u32,
    #[serde(rename = "k")]
    pub controllable: BTreeMap<EdgeId, u32>,
    #[serde(default)]
    pub groups: Vec<GroupSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<MorphProfile>,
}

impl Schedule {
    pub fn morph_count(&self) -> usize {
        self.starts.values().map(Vec::len).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ScheduleError> {
        serde_json::from_str(text).map_err(|e| ScheduleError::Mismatch(e.to_string()))
    }

    /// Cycle of the group containing `edge`, falling back to the drawing cycle
    /// for schedules without group data.
    pub fn cycle_of(&self, edge: EdgeId) -> Millis {
        self.groups
            .iter()
            .find(|g| g.edges.contains(&edge))
            .map_or(self.t_cycle, |g| g.t_cycle)
    }
}

/// A layout with everything the scheduler derives from it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub layout: GraphLayout,
    pub profile: MorphProfile,
    pub records: Vec<IntersectionRecord>,
    pub motions: Vec<StubMotion>,
    pub groups: Vec<MorphGroup>,
}

impl Instance {
    pub fn new(layout: GraphLayout, profile: MorphProfile) -> Result<Self, ScheduleError> {
        let records = classify_all(&compute_intersections(&layout)?, &profile);
        let motions = kinematics(&layout, &profile, &records);
        let groups = morphing_groups(&layout, &records)
            .iter()
            .map(|ids| MorphGroup::new(ids, &motions))
            .collect();
        Ok(Instance {
            layout,
            profile,
            records,
            motions,
            groups,
        })
    }

    /// Edge ids in scheduling order.
    pub fn order(&self, order: SortOrder) -> Vec<EdgeId> {
        let edges: Vec<(EdgeId, f64)> = self.motions.iter().map(|m| (m.edge, m.length)).collect();
        order.arrange(&edges)
    }

    pub fn schedule(&self, config: &SchedulerConfig) -> Result<Schedule, ScheduleError> {
        let order = self.order(config.order);
        let mut starts = BTreeMap::new();
        let mut controllable = BTreeMap::new();
        let mut groups = Vec::with_capacity(self.groups.len());
        for group in &self.groups {
            let local: Vec<usize> = order.iter().filter_map(|&id| group.local(id)).collect();
            let (state, t_total, t_cycle) = schedule_group(group, &local, config)?;
            for (e, edge) in group.edges().iter().enumerate() {
                starts.insert(edge.id, state.starts(e).to_vec());
                controllable.insert(edge.id, group.controllable(e, config.allow));
            }
            groups.push(GroupSchedule {
                edges: group.edges().iter().map(|e| e.id).collect(),
                t_total,
                t_cycle,
            });
        }
        Ok(Schedule {
            starts,
            t_total: groups.iter().map(|g| g.t_total).max().unwrap_or(0),
            t_cycle: groups.iter().map(|g| g.t_cycle).max().unwrap_or(0),
            allow: config.allow,
            controllable,
            groups,
            profile: Some(self.profile),
        })
    }
}

/// Runs the full pipeline on one group: serial assignment, then optional
/// cycle shortening, duplication and repair.
pub fn schedule_group<'g>(
    group: &'g MorphGroup,
    order: &[usize],
    config: &SchedulerConfig,
) -> Result<(GroupState<'g>, Millis, Millis), ScheduleError> {
    let n = config.allow;
    let mut state = schedule_with_allowance(group, order, n)?;
    let t_total = total_time(&state);
    let mut t_cycle = t_total;
    if config.overlap {
        t_cycle = shorten_cycle(&state, n)?.min(t_total);
    }
    if config.duplicate {
        schedule_duplication(&mut state, order, t_total, t_cycle, n)?;
    }
    if config.overlap && t_cycle < t_total {
        t_cycle = repair_overlap_allowance(&state, t_cycle, t_total, n);
    }
    Ok((state, t_total, t_cycle))
}
