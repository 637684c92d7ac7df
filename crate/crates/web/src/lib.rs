//! Browser bindings for the search simulator. The page in `www/` drives a
//! [`Demo`]: it steps a world, reads back the map, target belief and agent
//! poses for drawing, and inspects the latest planning round.
//!
//! Coordinates handed to JavaScript are in cell units: cell `(x, y)` spans
//! `[x, x + 1) x [y, y + 1)`.

use infosearch::belief::MotionModel;
use infosearch::gridworld::Cell;
use infosearch::scenario::{ScenarioConfig, TargetConfig, TargetStart};
use infosearch::selection::Candidate;
use infosearch::sim::World;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const PRESETS: &[(&str, &str)] = &[
    ("fig4", include_str!("../../../scenarios/fig4.json")),
    ("fig2a", include_str!("../../../scenarios/fig2a.json")),
    ("fig2b", include_str!("../../../scenarios/fig2b.json")),
    ("fig2c", include_str!("../../../scenarios/fig2c.json")),
    ("fig2d", include_str!("../../../scenarios/fig2d.json")),
    ("fig3a", include_str!("../../../scenarios/fig3a.json")),
    ("fig3b", include_str!("../../../scenarios/fig3b.json")),
    ("ahg", include_str!("../../../scenarios/ahg.json")),
];

/// Names of the bundled scenarios, comma separated.
#[wasm_bindgen]
pub fn preset_names() -> String {
    PRESETS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(",")
}

/// Scenario JSON for a bundled preset.
#[wasm_bindgen]
pub fn preset(name: &str) -> Option<String> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, j)| j.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    base: ScenarioConfig,
    scenario: ScenarioConfig,
    seed: u32,
    world: World,
}

impl Demo {
    pub fn parse(json: &str, seed: u32) -> Result<Self, String> {
        let base = ScenarioConfig::from_json(json).map_err(|e| e.to_string())?;
        let world = World::new(&base, seed.into()).map_err(|e| e.to_string())?;
        Ok(Self { scenario: base.clone(), base, seed, world })
    }

    fn rebuild(&mut self, scenario: ScenarioConfig) -> Result<(), String> {
        self.world = World::new(&scenario, self.seed.into()).map_err(|e| e.to_string())?;
        self.scenario = scenario;
        Ok(())
    }

    /// Puts a static target at `(x, y)` and restarts.
    pub fn try_place_target(&mut self, x: usize, y: usize) -> Result<(), String> {
        let cell = Cell::new(x, y);
        let dims = self.scenario.dims().map_err(|e| e.to_string())?;
        if !dims.contains(cell) {
            return Err(format!("cell ({x},{y}) is outside the map"));
        }
        if self.world.truth.contains(cell) {
            return Err(format!("cell ({x},{y}) is an obstacle"));
        }
        let mut s = self.scenario.clone();
        let motion = s.target.as_ref().map(|t| t.motion).unwrap_or(MotionModel::Static { sigma: 0.0 });
        let belief_motion = s.target.as_ref().and_then(|t| t.belief_motion);
        s.target = Some(TargetConfig { start: TargetStart::Cell([x, y]), motion, belief_motion });
        self.rebuild(s)
    }

    /// Resizes the team relative to the loaded scenario and restarts.
    pub fn try_set_agents(&mut self, count: usize) -> Result<(), String> {
        let mut s = self.base.with_agent_count(count, self.seed.into()).map_err(|e| e.to_string())?;
        s.target = self.scenario.target.clone();
        self.rebuild(s)
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    fn resolution(&self) -> f64 {
        self.world.grid.dims().resolution
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(json: &str, seed: u32) -> Result<Demo, JsError> {
        Self::parse(json, seed).map_err(|e| JsError::new(&e))
    }

    pub fn place_target(&mut self, x: usize, y: usize) -> Result<(), JsError> {
        self.try_place_target(x, y).map_err(|e| JsError::new(&e))
    }

    pub fn set_agents(&mut self, count: usize) -> Result<(), JsError> {
        self.try_set_agents(count).map_err(|e| JsError::new(&e))
    }

    /// Restarts the current setup with another seed.
    pub fn reset(&mut self, seed: u32) {
        self.seed = seed;
        self.world = World::new(&self.scenario, seed.into()).expect("scenario was validated on load");
    }

    /// Advances up to `n` steps; returns whether the run is over.
    pub fn step(&mut self, n: u32) -> bool {
        for _ in 0..n {
            if self.world.is_done() {
                break;
            }
            self.world.step();
        }
        self.world.is_done()
    }

    pub fn width(&self) -> usize {
        self.world.grid.dims().width
    }

    pub fn height(&self) -> usize {
        self.world.grid.dims().height
    }

    pub fn clock(&self) -> u32 {
        self.world.clock as u32
    }

    pub fn agent_count(&self) -> usize {
        self.world.agents.len()
    }

    pub fn total_entropy(&self) -> f64 {
        self.world.grid.total_entropy()
    }

    pub fn found(&self) -> bool {
        self.world.found()
    }

    /// Occupancy probability per cell, row major.
    pub fn occupancy(&self) -> Vec<f64> {
        self.world.grid.values().to_vec()
    }

    /// Target belief mass per cell, row major.
    pub fn belief(&self) -> Vec<f64> {
        self.world.belief.masses().to_vec()
    }

    /// 1 for cells that are truly blocked.
    pub fn truth(&self) -> Vec<u8> {
        self.world.grid.dims().cells().map(|c| self.world.truth.contains(c) as u8).collect()
    }

    /// `[x, y, heading]` per agent.
    pub fn poses(&self) -> Vec<f64> {
        let r = self.resolution();
        self.world.agents.iter().flat_map(|a| [a.pose.x / r, a.pose.y / r, a.pose.heading]).collect()
    }

    /// Flattened `[x, y, ...]` history of one agent.
    pub fn trajectory(&self, agent: usize) -> Vec<f64> {
        let r = self.resolution();
        self.world
            .metrics()
            .trajectories
            .get(agent)
            .map(|t| t.iter().flat_map(|p| [p.x / r, p.y / r]).collect())
            .unwrap_or_default()
    }

    /// `[x, y, found]` of the true target, empty without one. The position
    /// is the cell centre.
    pub fn target(&self) -> Vec<f64> {
        match &self.world.target {
            Some(t) => vec![t.position[0] + 0.5, t.position[1] + 0.5, t.found as u8 as f64],
            None => Vec::new(),
        }
    }

    /// Latest planning round as JSON: waypoints and, per agent in rank
    /// order, every scored candidate with the selected one flagged.
    pub fn plan_json(&self) -> String {
        let Some(round) = self.world.last_round() else {
            return "null".into();
        };
        let cell = |c: &Cell| json!([c.x, c.y]);
        let candidate = |c: &Candidate, selected: bool| -> Value {
            json!({
                "goal": c.goal.map(|w| cell(&w.cell)),
                "kind": c.goal.map(|w| format!("{:?}", w.kind).to_lowercase()),
                "ig": c.ig,
                "cost": c.cost,
                "utility": c.utility,
                "selected": selected,
                "path": c.path.source.cells().iter().map(cell).collect::<Vec<_>>(),
                "viewpoints": c.path.viewpoints.iter().map(cell).collect::<Vec<_>>(),
            })
        };
        let agents: Vec<Value> = round
            .selections
            .iter()
            .zip(&round.candidates)
            .map(|(sel, cands)| {
                json!({
                    "agent": sel.agent,
                    "candidates": cands.iter().map(|c| candidate(c, c == sel)).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "waypoints": round.waypoints.iter().map(|w| cell(&w.cell)).collect::<Vec<_>>(),
            "agents": agents,
        })
        .to_string()
    }
}
