//! Scenario files: map, agents, target and every tunable of a run.
//!
//! Scenarios are JSON documents carrying a `schema_version`. Missing optional
//! fields take the defaults below; [`ScenarioConfig::validate`] reports the
//! first offending field by its path, e.g. `agents[1].rank`.

use std::path::Path as FsPath;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{MotionModel, SensorModel};
use crate::error::{Error, Result};
use crate::gridworld::{Cell, GridDims, ObstacleSet};
use crate::selection::{GainMode, GainWeighting, SelectionConfig};
use crate::sim::{DwaConfig, Mode};
use crate::waypoints::WaypointConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub map: MapConfig,
    pub agents: Vec<AgentConfig>,
    /// `None` runs a pure coverage search with nothing to find.
    #[serde(default)]
    pub target: Option<TargetConfig>,
    #[serde(default)]
    pub mode: Mode,
    /// Planning horizon in planning steps.
    #[serde(default = "defaults::horizon")]
    pub horizon: usize,
    #[serde(default = "defaults::max_steps")]
    pub max_steps: u64,
    #[serde(default = "defaults::lambda")]
    pub lambda: f64,
    /// Per-step decay toward unknown in continuous mode.
    #[serde(default = "defaults::beta")]
    pub beta: f64,
    /// Entropy level (bits) that ends a single-mode search. Defaults to 5% of
    /// the initial map entropy.
    #[serde(default)]
    pub epsilon_h: Option<f64>,
    /// Simulation steps between forced replans.
    #[serde(default = "defaults::replan_interval")]
    pub replan_interval: u64,
    /// On replans, an agent keeps its current goal unless a rival's utility
    /// is higher by more than this.
    #[serde(default = "defaults::switch_margin")]
    pub switch_margin: f64,
    /// Planning steps between viewpoints along a candidate path.
    #[serde(default = "defaults::sample_period")]
    pub sample_period: f64,
    /// Simulation step, seconds.
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    /// Length of one planning step, seconds.
    #[serde(default = "defaults::plan_dt")]
    pub plan_dt: f64,
    #[serde(default)]
    pub gain_mode: GainMode,
    #[serde(default)]
    pub weighting: GainWeighting,
    #[serde(default)]
    pub waypoints: WaypointConfig,
    #[serde(default)]
    pub dwa: DwaConfig,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

mod defaults {
    pub fn horizon() -> usize {
        20
    }
    pub fn max_steps() -> u64 {
        3000
    }
    pub fn lambda() -> f64 {
        0.1
    }
    pub fn beta() -> f64 {
        0.005
    }
    pub fn replan_interval() -> u64 {
        20
    }
    pub fn switch_margin() -> f64 {
        4.0
    }
    pub fn sample_period() -> f64 {
        2.0
    }
    pub fn dt() -> f64 {
        0.1
    }
    pub fn plan_dt() -> f64 {
        1.0
    }
    pub fn resolution() -> f64 {
        1.0
    }
    pub fn max_speed() -> f64 {
        1.0
    }
    pub fn fov_range() -> usize {
        2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub width: usize,
    pub height: usize,
    #[serde(default = "defaults::resolution")]
    pub resolution: f64,
    #[serde(default)]
    pub obstacles: Vec<RectConfig>,
}

/// Obstacle rectangle in cells, lower corner `(x, y)` and size `w` x `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectConfig {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    /// Start cell `[x, y]`; the agent is placed at its center.
    pub start: [usize; 2],
    #[serde(default)]
    pub heading: f64,
    /// Meters per second.
    #[serde(default = "defaults::max_speed")]
    pub max_speed: f64,
    #[serde(default = "defaults::fov_range")]
    pub fov_range: usize,
    #[serde(default)]
    pub sensor: SensorModel,
    /// Defaults to the agent's position in the list.
    #[serde(default)]
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomStart {
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetStart {
    Cell([usize; 2]),
    /// Uniform over obstacle-free cells, drawn from the run seed.
    Random(RandomStart),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub start: TargetStart,
    #[serde(default)]
    pub motion: MotionModel,
    /// Motion model assumed by the filter; defaults to the true one.
    #[serde(default)]
    pub belief_motion: Option<MotionModel>,
}

impl ScenarioConfig {
    /// Smallest valid scenario: one agent at the origin, no target.
    pub fn minimal(width: usize, height: usize) -> Self {
        serde_json::from_value(serde_json::json!({
            "map": { "width": width, "height": height },
            "agents": [ { "start": [0, 0] } ],
        }))
        .expect("minimal scenario is well formed")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn dims(&self) -> Result<GridDims> {
        GridDims::new(self.map.width, self.map.height, self.map.resolution)
            .map_err(|e| Error::config("map", e.to_string()))
    }

    pub fn obstacles(&self) -> Result<ObstacleSet> {
        let dims = self.dims()?;
        let mut set = ObstacleSet::empty(dims);
        for r in &self.map.obstacles {
            for x in r.x..r.x + r.w {
                for y in r.y..r.y + r.h {
                    set.insert(Cell::new(x, y));
                }
            }
        }
        Ok(set)
    }

    pub fn selection_config(&self) -> SelectionConfig {
        SelectionConfig {
            lambda: self.lambda,
            horizon: self.horizon,
            sample_period: self.sample_period,
            gain_mode: self.gain_mode,
            weighting: self.weighting,
            waypoints: self.waypoints,
            switch_margin: self.switch_margin,
        }
    }

    pub fn rank_of(&self, index: usize) -> usize {
        self.agents[index].rank.unwrap_or(index)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let dims = self.dims()?;
        for (i, r) in self.map.obstacles.iter().enumerate() {
            if r.w == 0 || r.h == 0 || r.x + r.w > dims.width || r.y + r.h > dims.height {
                return Err(Error::config(
                    format!("map.obstacles[{i}]"),
                    "rectangle must be non-empty and inside the map",
                ));
            }
        }
        let truth = self.obstacles()?;

        if self.agents.is_empty() {
            return Err(Error::config("agents", "at least one agent is required"));
        }
        let n = self.agents.len();
        let mut seen = vec![false; n];
        for (i, a) in self.agents.iter().enumerate() {
            let field = |f: &str| format!("agents[{i}].{f}");
            let start = Cell::new(a.start[0], a.start[1]);
            if !dims.contains(start) {
                return Err(Error::config(field("start"), "start cell outside the map"));
            }
            if truth.contains(start) {
                return Err(Error::config(field("start"), "start cell is inside an obstacle"));
            }
            if !(a.max_speed > 0.0 && a.max_speed.is_finite()) {
                return Err(Error::config(field("max_speed"), "must be positive"));
            }
            if !a.heading.is_finite() {
                return Err(Error::config(field("heading"), "must be finite"));
            }
            a.sensor.validate().map_err(|e| Error::config(field("sensor"), e.to_string()))?;
            let rank = self.rank_of(i);
            if rank >= n || seen[rank] {
                return Err(Error::config(
                    field("rank"),
                    format!("ranks must be a permutation of 0..{n}, rank {rank} is invalid or repeated"),
                ));
            }
            seen[rank] = true;
        }

        if let Some(t) = &self.target {
            if let TargetStart::Cell([x, y]) = t.start {
                let c = Cell::new(x, y);
                if !dims.contains(c) || truth.contains(c) {
                    return Err(Error::config("target.start", "must be a free cell inside the map"));
                }
            } else if truth.len() == dims.len() {
                return Err(Error::config("target.start", "map has no free cell"));
            }
            t.motion.validate().map_err(|e| Error::config("target.motion", e.to_string()))?;
            if let Some(m) = &t.belief_motion {
                m.validate().map_err(|e| Error::config("target.belief_motion", e.to_string()))?;
            }
        }

        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(name, format!("must be positive, got {v}")))
            }
        };
        if self.horizon == 0 {
            return Err(Error::config("horizon", "must be positive"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("lambda", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::config("beta", "must lie in [0, 1]"));
        }
        if let Some(eps) = self.epsilon_h {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::config("epsilon_h", "must be >= 0"));
            }
        }
        if self.replan_interval == 0 {
            return Err(Error::config("replan_interval", "must be >= 1"));
        }
        if !(self.switch_margin >= 0.0 && self.switch_margin.is_finite()) {
            return Err(Error::config("switch_margin", "must be finite and >= 0"));
        }
        positive("sample_period", self.sample_period)?;
        positive("dt", self.dt)?;
        positive("plan_dt", self.plan_dt)?;
        if self.waypoints.min_cluster == 0 {
            return Err(Error::config("waypoints.min_cluster", "must be >= 1"));
        }
        self.dwa.validate()
    }

    /// Keeps the first `count` agents by rank, or clones the last agent at
    /// seed-jittered free start cells until there are `count` agents.
    pub fn with_agent_count(&self, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::config("agents", "agent count must be >= 1"));
        }
        let mut out = self.clone();
        let mut order: Vec<usize> = (0..self.agents.len()).collect();
        order.sort_by_key(|&i| self.rank_of(i));
        if count <= self.agents.len() {
            out.agents = order[..count]
                .iter()
                .enumerate()
                .map(|(rank, &i)| AgentConfig { rank: Some(rank), ..self.agents[i].clone() })
                .collect();
            return Ok(out);
        }
        let dims = self.dims()?;
        let truth = self.obstacles()?;
        let last = self.agents[*order.last().expect("validated scenarios have agents")].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_a9e7);
        for rank in self.agents.len()..count {
            let start = (0..1000)
                .map(|_| {
                    let dx = rng.gen_range(-2i64..=2);
                    let dy = rng.gen_range(-2i64..=2);
                    let x = (last.start[0] as i64 + dx).clamp(0, dims.width as i64 - 1) as usize;
                    let y = (last.start[1] as i64 + dy).clamp(0, dims.height as i64 - 1) as usize;
                    [x, y]
                })
                .find(|s| !truth.contains(Cell::new(s[0], s[1])))
                .unwrap_or(last.start);
            out.agents.push(AgentConfig { start, rank: Some(rank), ..last.clone() });
        }
        Ok(out)
    }
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: impl AsRef<FsPath>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ScenarioConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = ScenarioConfig::from_json(
            r#"{ "map": {"width": 5, "height": 4}, "agents": [{"start": [1, 1]}],
                 "target": {"start": [3, 2]} }"#,
        )
        .unwrap();
        assert_eq!(cfg.schema_version, 1);
        assert_eq!(cfg.map.resolution, 1.0);
        assert_eq!(cfg.mode, Mode::Single);
        assert_eq!(cfg.horizon, 20);
        assert_eq!(cfg.lambda, 0.1);
        assert_eq!(cfg.beta, 0.005);
        assert_eq!(cfg.replan_interval, 20);
        assert_eq!(cfg.agents[0].max_speed, 1.0);
        assert_eq!(cfg.agents[0].sensor, SensorModel { p_detect: 0.9, p_false: 0.0 });
        assert_eq!(cfg.target.as_ref().unwrap().motion, MotionModel::Static { sigma: 0.0 });
        assert_eq!(cfg.waypoints, WaypointConfig { min_cluster: 3, min_cell_area: 4 });
        assert_eq!(cfg.dwa, DwaConfig::default());
    }

    #[test]
    fn duplicated_rank_names_the_field() {
        let err = ScenarioConfig::from_json(
            r#"{ "map": {"width": 5, "height": 5},
                 "agents": [{"start": [0, 0], "rank": 0}, {"start": [1, 1], "rank": 0}] }"#,
        )
        .unwrap_err();
        match err {
            Error::Config { field, .. } => assert_eq!(field, "agents[1].rank"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_and_validation_errors_differ() {
        assert!(matches!(ScenarioConfig::from_json("{ nope"), Err(Error::Parse(_))));
        assert!(matches!(
            ScenarioConfig::from_json(r#"{"map": {"width": 3, "height": 3}, "agents": [], "bogus": 1}"#),
            Err(Error::Parse(_))
        ));
        let bad_start = r#"{"map": {"width": 3, "height": 3, "obstacles": [{"x":0,"y":0,"w":1,"h":1}]},
                            "agents": [{"start": [0, 0]}]}"#;
        match ScenarioConfig::from_json(bad_start).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "agents[0].start"),
            other => panic!("unexpected {other:?}"),
        }
        let bad_beta = r#"{"map": {"width": 3, "height": 3}, "agents": [{"start": [0, 0]}], "beta": 2.0}"#;
        assert!(matches!(ScenarioConfig::from_json(bad_beta), Err(Error::Config { field, .. }) if field == "beta"));
    }

    #[test]
    fn random_target_round_trips() {
        let mut cfg = ScenarioConfig::minimal(4, 4);
        cfg.target = Some(TargetConfig {
            start: TargetStart::Random(RandomStart::Random),
            motion: MotionModel::ConstVel { velocity: [0.5, 0.0], sigma: 0.3 },
            belief_motion: None,
        });
        let text = cfg.to_json();
        assert!(text.contains("\"random\""));
        assert_eq!(ScenarioConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn agent_count_override() {
        let mut cfg = ScenarioConfig::minimal(9, 9);
        cfg.agents[0].start = [4, 4];
        let more = cfg.with_agent_count(3, 1).unwrap();
        assert_eq!(more.agents.len(), 3);
        more.validate().unwrap();
        for a in &more.agents[1..] {
            assert!(a.start[0].abs_diff(4) <= 2 && a.start[1].abs_diff(4) <= 2);
        }
        assert_eq!(more, cfg.with_agent_count(3, 1).unwrap());
        let fewer = more.with_agent_count(1, 0).unwrap();
        assert_eq!(fewer.agents.len(), 1);
        assert_eq!(fewer.agents[0].start, [4, 4]);
        assert!(cfg.with_agent_count(0, 0).is_err());
    }
}
