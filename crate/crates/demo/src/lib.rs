//! Browser bindings: schedule a circle drawing, scrub through its animation
//! and inspect how its crossings are classified.

use medsched::geometry::{generate_circle_layout, MorphProfile, PointClass};
use medsched::render::frame_svg;
use medsched::scheduler::{Instance, Schedule, SchedulerConfig};
use medsched::validator::validate;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const RADIUS: f64 = 200.0;
const ETA: f64 = 0.5;
const SPEED: f64 = 100.0;
const PAUSE: i64 = 100;

#[derive(Debug, Serialize, PartialEq)]
pub struct Classification {
    pub nodes: u32,
    pub delta: f64,
    pub edges: usize,
    pub crossings: usize,
    pub fully_avoidable: usize,
    pub semi_avoidable: usize,
    pub always_crossing: usize,
    pub groups: usize,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub t_total: i64,
    pub t_cycle: i64,
    pub morphs: usize,
    pub max_crossings: usize,
    pub valid: bool,
}

#[wasm_bindgen]
pub struct Demo {
    nodes: u32,
    inst: Instance,
    schedule: Schedule,
}

impl Demo {
    pub fn create(nodes: u32, delta: f64) -> Result<Demo, String> {
        let layout = generate_circle_layout(nodes, RADIUS).map_err(|e| e.to_string())?;
        let profile = MorphProfile::new(delta, ETA, SPEED, PAUSE).map_err(|e| e.to_string())?;
        let inst = Instance::new(layout, profile).map_err(|e| e.to_string())?;
        let schedule = inst
            .schedule(&SchedulerConfig::default())
            .map_err(|e| e.to_string())?;
        Ok(Demo {
            nodes,
            inst,
            schedule,
        })
    }

    pub fn reschedule(
        &mut self,
        overlap: bool,
        duplicate: bool,
        allow: u32,
        order: &str,
    ) -> Result<Summary, String> {
        let config = SchedulerConfig {
            order: order
                .parse()
                .map_err(|e: medsched::scheduler::ScheduleError| e.to_string())?,
            overlap,
            duplicate,
            allow,
        };
        self.schedule = self.inst.schedule(&config).map_err(|e| e.to_string())?;
        let report = validate(&self.inst, &self.schedule, allow).map_err(|e| e.to_string())?;
        Ok(Summary {
            t_total: self.schedule.t_total,
            t_cycle: self.schedule.t_cycle,
            morphs: self.schedule.morph_count(),
            max_crossings: report.max_crossings,
            valid: report.valid,
        })
    }

    pub fn classification(&self) -> Classification {
        let count = |c| self.inst.records.iter().filter(|r| r.class == c).count() / 2;
        Classification {
            nodes: self.nodes,
            delta: self.inst.profile.delta,
            edges: self.inst.layout.edges().len(),
            crossings: self.inst.records.len() / 2,
            fully_avoidable: count(PointClass::FullyAvoidable),
            semi_avoidable: count(PointClass::SemiAvoidable),
            always_crossing: count(PointClass::AlwaysCrossing),
            groups: self.inst.groups.len(),
        }
    }
}

fn js<T: Serialize>(value: &T) -> Result<String, JsError> {
    serde_json::to_string(value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
impl Demo {
    /// K_`nodes` on a circle with minimum stub ratio `delta`.
    #[wasm_bindgen(constructor)]
    pub fn new(nodes: u32, delta: f64) -> Result<Demo, JsError> {
        Demo::create(nodes, delta).map_err(|e| JsError::new(&e))
    }

    /// Recomputes the schedule; returns a JSON summary.
    pub fn schedule(
        &mut self,
        overlap: bool,
        duplicate: bool,
        allow: u32,
        order: &str,
    ) -> Result<String, JsError> {
        let summary = self
            .reschedule(overlap, duplicate, allow, order)
            .map_err(|e| JsError::new(&e))?;
        js(&summary)
    }

    #[wasm_bindgen(js_name = scheduleJson)]
    pub fn schedule_json(&self) -> String {
        self.schedule.to_json()
    }

    /// SVG of the drawing at `t` ms.
    pub fn frame(&self, t: f64) -> String {
        frame_svg(&self.inst, &self.schedule, t)
    }

    /// Crossing counts per class, as JSON.
    pub fn classify(&self) -> Result<String, JsError> {
        js(&self.classification())
    }

    /// Length of one animation loop in ms.
    #[wasm_bindgen(getter)]
    pub fn period(&self) -> f64 {
        self.schedule.t_cycle as f64
    }
}
