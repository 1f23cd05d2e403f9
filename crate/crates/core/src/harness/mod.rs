//! Experiment sweeps over circle layouts, statistics and CSV output.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{generate_circle_layout, MorphProfile, PointClass};
use crate::scheduler::{Instance, Schedule, ScheduleError, SchedulerConfig, SortOrder};
use crate::timeline::Millis;
use crate::validator::{validate, ValidationReport};

/// Version tag written in the CSV header comment.
pub const CSV_VERSION: &str = "medsched-results v1";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("empty input")]
    Empty,
    #[error("bad experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("validation failed for {case}")]
    Validation {
        case: String,
        layout_json: String,
        schedule_json: String,
        report: Box<ValidationReport>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub nodes: Vec<u32>,
    pub radius: f64,
    pub speed: f64,
    pub pause: Millis,
    pub eta: f64,
    pub deltas: Vec<f64>,
    /// Orders per case: descending, ascending, then seeded shuffles.
    pub orders: usize,
    /// Largest allowable crossing number; per layout it is further capped
    /// at one below the most crossings any edge has.
    pub max_allow: u32,
    pub seed: u64,
    /// Validate every schedule and abort on the first failure.
    pub validate: bool,
}

impl ExperimentConfig {
    /// The full sweep: K7 to K13, four δ values, 100 orders, n up to 10.
    pub fn paper() -> Self {
        ExperimentConfig {
            nodes: (7..=13).collect(),
            radius: 200.0,
            speed: 100.0,
            pause: 100,
            eta: 0.5,
            deltas: vec![0.04, 0.09, 0.16, 0.25],
            orders: 100,
            max_allow: 10,
            seed: 2022,
            validate: true,
        }
    }

    /// Same sweep with 10 orders.
    pub fn ci() -> Self {
        ExperimentConfig {
            orders: 10,
            ..Self::paper()
        }
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.orders < 2 {
            return bad("at least two orders are needed");
        }
        if self.nodes.is_empty() || self.deltas.is_empty() {
            return bad("node and delta lists must be non-empty");
        }
        if self.nodes.iter().any(|&n| n < 4) {
            return bad("node counts below 4 have no crossings");
        }
        for &d in &self.deltas {
            MorphProfile::new(d, self.eta, self.speed, self.pause)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        if self.radius.is_nan() || self.radius <= 0.0 {
            return bad("radius must be positive");
        }
        Ok(())
    }

    /// Sort order number `i`.
    pub fn order(&self, i: usize) -> SortOrder {
        match i {
            0 => SortOrder::Descending,
            1 => SortOrder::Ascending,
            _ => SortOrder::Seeded(self.seed.wrapping_mul(1_000_003).wrapping_add(i as u64)),
        }
    }
}

/// One (nodes, δ, order, n) case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub nodes: u32,
    pub delta: f64,
    pub order: usize,
    pub order_label: String,
    pub n: u32,
    pub edges: usize,
    /// Total time of the plain schedule at this n.
    pub t_total: Millis,
    /// Cycle with overlap at this n.
    pub t_cycle: Millis,
    /// Morph count with duplication at this n.
    pub morphs: usize,
    /// Total time of the plain schedule with duplication at this n.
    pub dup_total: Millis,
    pub overlap_ratio: f64,
    pub dup_ratio: f64,
    /// `t_total` at this n over `t_total` at n = 0.
    pub allowance_ratio: f64,
    pub fully_avoidable: bool,
    pub max_crossings: usize,
    pub validated: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    /// Combinations left out, with the reason.
    pub skipped: Vec<String>,
}

/// Largest allowable number worth sweeping for a layout: one below the most
/// crossings on a single edge.
pub fn allow_cap(inst: &Instance) -> u32 {
    let most = inst
        .motions
        .iter()
        .map(|m| m.points.len())
        .max()
        .unwrap_or(0);
    most.saturating_sub(1) as u32
}

pub fn fully_avoidable(inst: &Instance) -> bool {
    inst.records
        .iter()
        .all(|r| r.class == PointClass::FullyAvoidable)
}

fn checked(
    inst: &Instance,
    schedule: Schedule,
    allow: u32,
    enabled: bool,
    case: impl Fn() -> String,
) -> Result<(Schedule, Option<ValidationReport>), HarnessError> {
    if !enabled {
        return Ok((schedule, None));
    }
    let report = validate(inst, &schedule, allow)?;
    if !report.valid {
        return Err(HarnessError::Validation {
            case: case(),
            layout_json: inst.layout.to_json(),
            schedule_json: schedule.to_json(),
            report: Box::new(report),
        });
    }
    Ok((schedule, Some(report)))
}

/// Rows for every n of one (nodes, δ, order) case.
pub fn run_case(
    config: &ExperimentConfig,
    inst: &Instance,
    nodes: u32,
    delta: f64,
    order_index: usize,
) -> Result<Vec<ResultRow>, HarnessError> {
    let order = config.order(order_index);
    let top = config.max_allow.min(allow_cap(inst));
    let fully = fully_avoidable(inst);
    let mut rows = Vec::new();
    let mut base_total = None;
    for n in 0..=top {
        let cfg = |overlap, duplicate| SchedulerConfig {
            order,
            overlap,
            duplicate,
            allow: n,
        };
        let label = |variant: &str| format!("K{nodes} delta={delta} order={order} n={n} {variant}");
        let (base, report) = checked(
            inst,
            inst.schedule(&cfg(false, false))?,
            n,
            config.validate,
            || label("plain"),
        )?;
        let (over, _) = checked(
            inst,
            inst.schedule(&cfg(true, false))?,
            n,
            config.validate,
            || label("overlap"),
        )?;
        let (dup, _) = checked(
            inst,
            inst.schedule(&cfg(false, true))?,
            n,
            config.validate,
            || label("duplicate"),
        )?;
        let t0 = *base_total.get_or_insert(base.t_total);
        let edges = inst.layout.edges().len();
        rows.push(ResultRow {
            nodes,
            delta,
            order: order_index,
            order_label: order.to_string(),
            n,
            edges,
            t_total: base.t_total,
            t_cycle: over.t_cycle,
            morphs: dup.morph_count(),
            dup_total: dup.t_total,
            overlap_ratio: over.t_cycle as f64 / base.t_total as f64,
            dup_ratio: edges as f64 / dup.morph_count() as f64,
            allowance_ratio: base.t_total as f64 / t0 as f64,
            fully_avoidable: fully,
            max_crossings: report.map_or(0, |r| r.max_crossings),
            validated: config.validate,
        });
    }
    Ok(rows)
}

/// Runs the whole sweep. Rows come back sorted by (nodes, δ, order, n)
/// whatever order the cases finish in.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    config.check()?;
    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for &nodes in &config.nodes {
        for &delta in &config.deltas {
            let profile = MorphProfile::new(delta, config.eta, config.speed, config.pause)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let layout =
                generate_circle_layout(nodes, config.radius).map_err(ScheduleError::from)?;
            let inst = Instance::new(layout, profile)?;
            let cap = allow_cap(&inst);
            if cap < config.max_allow {
                skipped.push(format!(
                    "K{nodes} delta={delta}: n in {}..={} skipped, no edge has more than {} crossings",
                    cap + 1,
                    config.max_allow,
                    cap + 1
                ));
            }
            instances.push((nodes, delta, inst));
        }
    }
    let tasks: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..config.orders).map(move |o| (i, o)))
        .collect();
    let run = |&(i, o): &(usize, usize)| {
        let (nodes, delta, inst) = &instances[i];
        run_case(config, inst, *nodes, *delta, o)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Result<Vec<ResultRow>, HarnessError>> = {
        use rayon::prelude::*;
        tasks.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<Vec<ResultRow>, HarnessError>> = tasks.iter().map(run).collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| {
        a.nodes
            .cmp(&b.nodes)
            .then(a.delta.total_cmp(&b.delta))
            .then(a.order.cmp(&b.order))
            .then(a.n.cmp(&b.n))
    });
    Ok(ExperimentOutcome { rows, skipped })
}

/// Writes rows as CSV behind a version comment line.
pub fn write_csv<W: Write>(mut out: W, rows: &[ResultRow]) -> Result<(), HarnessError> {
    writeln!(out, "# {CSV_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>, HarnessError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Quartiles by linear interpolation between order statistics.
pub fn quartiles(values: &[f64]) -> Result<(f64, f64, f64), HarnessError> {
    if values.is_empty() {
        return Err(HarnessError::Empty);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |q: f64| {
        let pos = q * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    Ok((at(0.25), at(0.5), at(0.75)))
}

/// Quartiles of the three ratios for one node count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSummary {
    pub nodes: u32,
    pub samples: usize,
    pub overlap: (f64, f64, f64),
    pub duplication: (f64, f64, f64),
    /// Allowance ratio quartiles for each n.
    pub allowance: BTreeMap<u32, (f64, f64, f64)>,
}

pub fn summarize(rows: &[ResultRow]) -> Result<Vec<NodeSummary>, HarnessError> {
    let mut by_nodes: BTreeMap<u32, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        by_nodes.entry(r.nodes).or_default().push(r);
    }
    by_nodes
        .into_iter()
        .map(|(nodes, rs)| {
            let col = |f: fn(&ResultRow) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let mut by_n: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
            for r in &rs {
                by_n.entry(r.n).or_default().push(r.allowance_ratio);
            }
            Ok(NodeSummary {
                nodes,
                samples: rs.len(),
                overlap: quartiles(&col(|r| r.overlap_ratio))?,
                duplication: quartiles(&col(|r| r.dup_ratio))?,
                allowance: by_n
                    .into_iter()
                    .map(|(n, v)| Ok((n, quartiles(&v)?)))
                    .collect::<Result<_, HarnessError>>()?,
            })
        })
        .collect()
}
