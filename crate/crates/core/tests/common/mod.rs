#![allow(dead_code)]

use std::collections::BTreeMap;

use medsched::geometry::{generate_random_layout, EdgeId, MorphProfile};
use medsched::scheduler::{ForbiddenLevel, GroupState, Instance};
use medsched::validator::brute_force_forbidden;
use medsched::{Millis, TimePeriod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Most crossing points an edge may carry in oracle instances.
pub const MAX_POINTS: usize = 12;
pub const HORIZON: Millis = 1500;

/// Small random drawing with a fast profile so stub timings stay in the
/// hundreds of ms, plus a random partial schedule.
pub fn random_case(seed: u64) -> (Instance, BTreeMap<EdgeId, Vec<Millis>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.gen_range(5..=8);
    let layout = generate_random_layout(nodes, rng.gen_range(0.35..0.7), 300.0, rng.gen()).unwrap();
    let delta: f64 = rng.gen_range(0.02..0.3);
    let eta = rng.gen_range((delta + 0.05).min(0.5)..=0.5);
    let profile = MorphProfile::new(
        delta,
        eta,
        rng.gen_range(600.0..2000.0),
        rng.gen_range(0..60),
    )
    .unwrap();
    let inst = Instance::new(layout, profile).unwrap();
    let mut starts = BTreeMap::new();
    for m in &inst.motions {
        if rng.gen_bool(0.6) {
            let first = rng.gen_range(0..400);
            let mut v = vec![first];
            if rng.gen_bool(0.3) {
                v.push(first + m.tau_trip + rng.gen_range(0..200));
            }
            starts.insert(m.edge, v);
        }
    }
    (inst, starts)
}

pub fn random_level(rng: &mut ChaCha8Rng) -> ForbiddenLevel {
    match rng.gen_range(0..4) {
        0 => ForbiddenLevel::Basic,
        1 => ForbiddenLevel::SelfAvoiding,
        2 => ForbiddenLevel::Cycle(rng.gen_range(0..900)),
        _ => ForbiddenLevel::Allowance {
            cycle: if rng.gen_bool(0.5) {
                0
            } else {
                rng.gen_range(1..900)
            },
            allow: rng.gen_range(0..4),
        },
    }
}

/// Edges of the case compared at all four levels; returns mismatches.
pub fn oracle_mismatches(seed: u64) -> (usize, Vec<String>) {
    let (inst, starts) = random_case(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let horizon = TimePeriod::interval(-HORIZON, HORIZON);
    let mut checked = 0;
    let mut bad = Vec::new();
    for g in &inst.groups {
        let local: Vec<Vec<Millis>> = g
            .edges()
            .iter()
            .map(|e| starts.get(&e.id).cloned().unwrap_or_default())
            .collect();
        let state = GroupState::with_starts(g, local);
        for (e, edge) in g.edges().iter().enumerate() {
            if edge.points.len() > MAX_POINTS {
                continue;
            }
            let allow = rng.gen_range(0..4);
            let levels = [
                ForbiddenLevel::Basic,
                ForbiddenLevel::SelfAvoiding,
                ForbiddenLevel::Cycle(rng.gen_range(0..900)),
                ForbiddenLevel::Allowance { cycle: 0, allow },
                random_level(&mut rng),
            ];
            for level in levels {
                checked += 1;
                let fast = state.forbidden(e, level).intersect(&horizon);
                let slow = brute_force_forbidden(&inst, &starts, edge.id, level, HORIZON);
                if fast != slow {
                    bad.push(format!(
                        "seed {seed} edge {} {level:?}: scheduler {fast} brute {slow}",
                        edge.id
                    ));
                }
            }
        }
    }
    (checked, bad)
}
