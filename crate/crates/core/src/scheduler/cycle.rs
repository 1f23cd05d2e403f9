use super::group::{ForbiddenLevel, GroupState, MorphGroup};
use super::ScheduleError;
use crate::geometry::{PointClass, Reach};
use crate::timeline::{Millis, TimePeriod};

fn earliest(
    state: &GroupState<'_>,
    e: usize,
    level: ForbiddenLevel,
) -> Result<Millis, ScheduleError> {
    state
        .forbidden(e, level)
        .t_earliest()
        .map_err(|_| ScheduleError::NoFeasibleTime(state.group().edges()[e].id))
}

/// Serial greedy assignment: each edge in `order` gets the earliest start
/// outside its forbidden period at `level`.
pub fn schedule_serial<'g>(
    group: &'g MorphGroup,
    order: &[usize],
    level: ForbiddenLevel,
) -> Result<GroupState<'g>, ScheduleError> {
    let mut state = GroupState::new(group);
    for &e in order {
        let t = earliest(&state, e, level)?;
        state.add_start(e, t);
    }
    Ok(state)
}

/// Serial assignment without crossings or allowance; fails on groups where an
/// opposite stub always passes a point.
pub fn schedule_basic<'g>(
    group: &'g MorphGroup,
    order: &[usize],
) -> Result<GroupState<'g>, ScheduleError> {
    schedule_serial(group, order, ForbiddenLevel::Basic)
}

pub fn schedule_with_allowance<'g>(
    group: &'g MorphGroup,
    order: &[usize],
    allow: u32,
) -> Result<GroupState<'g>, ScheduleError> {
    schedule_serial(group, order, ForbiddenLevel::Allowance { cycle: 0, allow })
}

/// End of the last morph.
pub fn total_time(state: &GroupState<'_>) -> Millis {
    state
        .group()
        .edges()
        .iter()
        .zip(state.all_starts())
        .flat_map(|(e, s)| s.iter().map(move |t| t + e.tau_trip))
        .max()
        .unwrap_or(0)
}

/// Tentative cycle from the latest negative start each edge could take in a
/// previous repetition. Not clamped: a lone edge yields `tau_trip + 1`.
pub fn shorten_cycle(state: &GroupState<'_>, allow: u32) -> Result<Millis, ScheduleError> {
    let mut cycle = 0;
    for e in 0..state.group().len() {
        let Some(&t) = state.starts(e).first() else {
            continue;
        };
        let latest = state
            .forbidden(e, ForbiddenLevel::Allowance { cycle: 0, allow })
            .t_latest()
            .map_err(|_| ScheduleError::NoFeasibleTime(state.group().edges()[e].id))?;
        cycle = cycle.max(t - latest);
    }
    Ok(cycle)
}

/// Adds extra morphs that still end within `t_total`, round by round in
/// `order`, until no edge accepts another start. Returns the number added.
pub fn schedule_duplication(
    state: &mut GroupState<'_>,
    order: &[usize],
    t_total: Millis,
    cycle: Millis,
    allow: u32,
) -> Result<usize, ScheduleError> {
    let level = ForbiddenLevel::Allowance { cycle, allow };
    let mut active = order.to_vec();
    let mut added = 0;
    while !active.is_empty() {
        let mut next = Vec::new();
        for &e in &active {
            let t = earliest(state, e, level)?;
            if t + state.group().edges()[e].tau_trip <= t_total {
                state.add_start(e, t);
                next.push(e);
                added += 1;
            }
        }
        active = next;
    }
    Ok(added)
}

/// Grows a tentative cycle by the measure of violating time in the periodic
/// replay until the replay is clean; `t_total` is always clean.
pub fn repair_overlap_allowance(
    state: &GroupState<'_>,
    mut cycle: Millis,
    t_total: Millis,
    allow: u32,
) -> Millis {
    while cycle < t_total {
        let bad = periodic_violation(state, cycle, t_total, allow);
        if bad == 0 {
            break;
        }
        cycle = (cycle + bad).min(t_total);
    }
    cycle.min(t_total)
}

/// Measure of instants, in one steady-state period of the replay with period
/// `cycle`, at which some edge overlaps its own morph or breaks its allowance.
pub fn periodic_violation(
    state: &GroupState<'_>,
    cycle: Millis,
    t_total: Millis,
    allow: u32,
) -> Millis {
    assert!(cycle > 0);
    let copies = (t_total + cycle - 1) / cycle;
    let window = TimePeriod::interval(copies * cycle, (copies + 1) * cycle);
    let replay: Vec<Vec<Millis>> = state
        .all_starts()
        .iter()
        .map(|s| {
            (0..=copies)
                .flat_map(|j| s.iter().map(move |t| t + j * cycle))
                .collect()
        })
        .collect();
    let group = state.group();
    let replayed = GroupState::with_starts(group, replay);
    let mut bad = Vec::new();
    for (e, edge) in group.edges().iter().enumerate() {
        let morphs: Vec<TimePeriod> = replayed
            .starts(e)
            .iter()
            .map(|&t| TimePeriod::interval(t, t + edge.tau_trip))
            .collect();
        bad.push(TimePeriod::depth_at_least(&morphs, 2));
        bad.push(allowance_violation(
            &replayed,
            e,
            group.controllable(e, allow),
        ));
    }
    TimePeriod::union_all(&bad)
        .intersect(&window)
        .measure()
        .expect("window is bounded")
}

/// Instants at which edge `e` has more counted crossings than the allowance
/// tolerates. Crossings at semi-avoidable points that `e` itself always
/// passes are driven by the opposite edge; those that the opposite always
/// passes are driven by `e`. A lone driven-by-opposite crossing is accepted
/// at `k = 0`, as is any number of driven-by-`e` crossings on their own.
pub(crate) fn allowance_violation(state: &GroupState<'_>, e: usize, k: u32) -> TimePeriod {
    let edge = &state.group().edges()[e];
    let mut fully = Vec::new();
    let mut hard = Vec::new();
    let mut all = Vec::new();
    for (i, p) in edge.points.iter().enumerate() {
        let x = state.crossing(e, i);
        if !p.counts() || x.is_empty() {
            continue;
        }
        all.push(x);
        match (p.class, p.reach) {
            (PointClass::FullyAvoidable, _) => {
                fully.push(x);
                hard.push(x);
            }
            (_, Reach::Always) => hard.push(x),
            _ => {}
        }
    }
    let k = k as usize;
    let over = TimePeriod::depth_at_least(fully, k + 1);
    let crowded =
        TimePeriod::union_all(hard).intersect(&TimePeriod::depth_at_least(all, k.max(1) + 1));
    over.union(&crowded)
}
