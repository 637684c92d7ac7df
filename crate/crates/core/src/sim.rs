//! Deterministic multi-agent search simulation.
//!
//! Every step runs, in order: sensing, belief update, map decay (continuous
//! mode only), replanning when a trigger fires, dynamic-window motion toward
//! the planned path, target motion, and metrics bookkeeping. All randomness
//! comes from one seeded ChaCha stream owned by the [`World`].

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{
    correct_all, predict, reset_uniform_unknown, MotionModel, Observation, Outcome, SensorModel, TargetBelief,
};
use crate::error::{Error, Result};
use crate::gridworld::{fov_cells, normalize_angle, Cell, ObstacleSet, OccupancyGrid, Pose};
use crate::scenario::{ScenarioConfig, TargetStart};
use crate::waypoints::{collect_waypoints, Waypoint, WaypointKind};
use crate::selection::{gain, plan_round_committed, AgentSpec, Candidate, ClaimedCells, GainMode, PlanRound, SelectionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Stop at detection, at low residual map entropy, or at `max_steps`.
    #[default]
    Single,
    /// Run exactly `max_steps` while the map decays back toward unknown.
    Continuous,
}

/// Dynamic-window controller and path-following parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DwaConfig {
    /// m/s^2
    pub max_accel: f64,
    /// rad/s^2
    pub max_yaw_accel: f64,
    /// rad/s
    pub max_yaw_rate: f64,
    pub v_samples: usize,
    pub w_samples: usize,
    /// Forward simulation horizon, seconds.
    pub sim_horizon: f64,
    pub heading_weight: f64,
    pub clearance_weight: f64,
    pub velocity_weight: f64,
    /// Clearance beyond this distance (m) scores as fully clear.
    pub clearance_cap: f64,
    /// Path cells ahead of the last reached cell used as the local goal.
    pub lookahead: usize,
    /// Steps without path progress before a replan is forced.
    pub stall_steps: u64,
}

impl Default for DwaConfig {
    fn default() -> Self {
        Self {
            max_accel: 0.5,
            max_yaw_accel: PI,
            max_yaw_rate: 2.0,
            v_samples: 7,
            w_samples: 11,
            sim_horizon: 1.0,
            heading_weight: 1.0,
            clearance_weight: 0.2,
            velocity_weight: 0.2,
            clearance_cap: 1.0,
            lookahead: 2,
            stall_steps: 50,
        }
    }
}

impl DwaConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("dwa.max_accel", self.max_accel),
            ("dwa.max_yaw_accel", self.max_yaw_accel),
            ("dwa.max_yaw_rate", self.max_yaw_rate),
            ("dwa.sim_horizon", self.sim_horizon),
            ("dwa.clearance_cap", self.clearance_cap),
        ];
        for (field, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(field, format!("must be positive, got {v}")));
            }
        }
        for (field, v) in [
            ("dwa.heading_weight", self.heading_weight),
            ("dwa.clearance_weight", self.clearance_weight),
            ("dwa.velocity_weight", self.velocity_weight),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(field, format!("must be >= 0, got {v}")));
            }
        }
        if self.v_samples < 2 || self.w_samples < 2 {
            return Err(Error::config("dwa.v_samples", "need at least 2 samples per axis"));
        }
        if self.stall_steps == 0 {
            return Err(Error::config("dwa.stall_steps", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub spec: AgentSpec,
    /// m/s
    pub max_speed: f64,
    pub pose: Pose,
    pub v: f64,
    pub w: f64,
    pub plan: Option<Candidate>,
    /// Index into the plan path of the last reached cell.
    pub progress: usize,
    stalled: u64,
}

impl AgentState {
    pub fn new(spec: AgentSpec, max_speed: f64, pose: Pose) -> Self {
        Self { spec, max_speed, pose, v: 0.0, w: 0.0, plan: None, progress: 0, stalled: 0 }
    }

    fn path_cells(&self) -> &[Cell] {
        self.plan.as_ref().map(|p| p.path.source.cells()).unwrap_or(&[])
    }

    fn reached_goal(&self) -> bool {
        match &self.plan {
            Some(p) if !p.is_hold() => self.progress + 1 >= p.path.source.cells().len(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    pub cell: Cell,
    /// Continuous position in cell units; `cell` is its rounding.
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub model: MotionModel,
    pub found: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub initial_entropy: f64,
    /// Total map entropy after each step.
    pub entropy: Vec<f64>,
    /// Pose of each agent after each step.
    pub trajectories: Vec<Vec<Pose>>,
    /// Steps until the first true detection.
    pub search_time: Option<u64>,
    /// Bits removed per step over the whole run.
    pub entropy_reduction_rate: f64,
    pub plan_rounds: u64,
    /// Wall time per planning round, seconds. Not reproducible across runs.
    #[serde(skip)]
    pub plan_latency: Vec<f64>,
}

impl Metrics {
    fn new(initial_entropy: f64, agents: usize) -> Self {
        Self {
            initial_entropy,
            entropy: Vec::new(),
            trajectories: vec![Vec::new(); agents],
            search_time: None,
            entropy_reduction_rate: 0.0,
            plan_rounds: 0,
            plan_latency: Vec::new(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.entropy.len() as u64
    }

    pub fn final_entropy(&self) -> f64 {
        self.entropy.last().copied().unwrap_or(self.initial_entropy)
    }
}

#[derive(Debug, Clone)]
pub struct World {
    pub grid: OccupancyGrid,
    pub truth: ObstacleSet,
    pub belief: TargetBelief,
    pub agents: Vec<AgentState>,
    pub target: Option<TargetState>,
    pub clock: u64,
    pub mode: Mode,
    rng: ChaCha8Rng,
    selection: SelectionConfig,
    filter_model: MotionModel,
    dwa: DwaConfig,
    dt: f64,
    beta: f64,
    replan_interval: u64,
    max_steps: u64,
    epsilon_h: f64,
    last_round: Option<PlanRound>,
    metrics: Metrics,
}

impl World {
    pub fn new(scenario: &ScenarioConfig, seed: u64) -> Result<Self> {
        scenario.validate()?;
        let dims = scenario.dims()?;
        let truth = scenario.obstacles()?;
        let grid = OccupancyGrid::unknown(dims);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let agents = scenario
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let spec = AgentSpec {
                    id: i,
                    rank: scenario.rank_of(i),
                    speed: a.max_speed * scenario.plan_dt / dims.resolution,
                    fov_range: a.fov_range,
                    sensor: a.sensor,
                };
                let (x, y) = dims.center_of(Cell::new(a.start[0], a.start[1]));
                AgentState::new(spec, a.max_speed, Pose::new(x, y, a.heading))
            })
            .collect::<Vec<_>>();

        let target = match &scenario.target {
            None => None,
            Some(t) => {
                let cell = match t.start {
                    TargetStart::Cell([x, y]) => Cell::new(x, y),
                    TargetStart::Random(_) => {
                        let free: Vec<Cell> = dims.cells().filter(|c| !truth.contains(*c)).collect();
                        free[rng.gen_range(0..free.len())]
                    }
                };
                Some(TargetState {
                    cell,
                    position: [cell.x as f64, cell.y as f64],
                    velocity: t.motion.velocity(),
                    model: t.motion,
                    found: false,
                })
            }
        };
        let filter_model = scenario
            .target
            .as_ref()
            .map(|t| t.belief_motion.unwrap_or(t.motion))
            .unwrap_or_default();

        let initial_entropy = grid.total_entropy();
        let metrics = Metrics::new(initial_entropy, agents.len());
        Ok(Self {
            belief: TargetBelief::uniform(dims),
            grid,
            truth,
            agents,
            target,
            clock: 0,
            mode: scenario.mode,
            rng,
            selection: scenario.selection_config(),
            filter_model,
            dwa: scenario.dwa,
            dt: scenario.dt,
            beta: scenario.beta,
            replan_interval: scenario.replan_interval,
            max_steps: scenario.max_steps,
            epsilon_h: scenario.epsilon_h.unwrap_or(0.05 * initial_entropy),
            last_round: None,
            metrics,
        })
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn into_metrics(self) -> Metrics {
        self.metrics
    }

    pub fn last_round(&self) -> Option<&PlanRound> {
        self.last_round.as_ref()
    }

    pub fn found(&self) -> bool {
        self.target.as_ref().is_some_and(|t| t.found)
    }

    pub fn epsilon_h(&self) -> f64 {
        self.epsilon_h
    }

    /// Termination test for [`run`].
    pub fn is_done(&self) -> bool {
        if self.clock >= self.max_steps {
            return true;
        }
        match self.mode {
            Mode::Continuous => false,
            // The entropy threshold only ends searches with nothing to find.
            Mode::Single => match &self.target {
                Some(t) => t.found,
                None => self.grid.total_entropy() < self.epsilon_h,
            },
        }
    }

    pub fn step(&mut self) {
        if self.mode == Mode::Single && self.found() {
            self.record();
            return;
        }
        let observations = self.sense();
        self.update_belief(&observations);
        if self.mode == Mode::Continuous {
            self.grid
                .decay_to_unknown(self.beta)
                .expect("beta validated with the scenario");
        }
        if self.needs_replan() {
            self.replan();
        }
        self.move_agents();
        self.move_target();
        self.record();
    }

    fn sense(&mut self) -> Vec<Observation> {
        let dims = *self.grid.dims();
        let mut out = Vec::with_capacity(self.agents.len());
        for (i, agent) in self.agents.iter().enumerate() {
            let fov = fov_cells(&agent.pose, agent.spec.fov_range, &dims).expect("agents stay inside the map");
            self.grid.observe(&fov, &self.truth);
            let sensor = agent.spec.sensor;
            let mut outcome = Outcome::NotDetected;
            if let Some(t) = self.target.as_mut() {
                if fov.contains(t.cell) && self.rng.gen_bool(sensor.p_detect) {
                    outcome = Outcome::Detected(t.cell);
                    if !t.found {
                        t.found = true;
                        self.metrics.search_time = Some(self.clock + 1);
                    }
                }
            }
            if outcome == Outcome::NotDetected && sensor.p_false > 0.0 && self.rng.gen_bool(sensor.p_false) {
                let k = self.rng.gen_range(0..fov.len());
                outcome = Outcome::Detected(fov.cells()[k]);
            }
            out.push(Observation { agent: i, fov, outcome });
        }
        out
    }

    fn update_belief(&mut self, observations: &[Observation]) {
        let sensors: Vec<SensorModel> = self.agents.iter().map(|a| a.spec.sensor).collect();
        let corrected = correct_all(&self.belief, observations, &sensors)
            .or_else(|_| reset_uniform_unknown(&self.grid))
            .unwrap_or_else(|_| TargetBelief::uniform(*self.grid.dims()));
        self.belief = predict(&corrected, &self.filter_model);
    }

    fn needs_replan(&self) -> bool {
        if self.clock % self.replan_interval == 0 {
            return true;
        }
        self.agents.iter().any(|a| {
            let Some(plan) = &a.plan else { return true };
            if a.reached_goal() || a.stalled >= self.dwa.stall_steps {
                return true;
            }
            plan.ig > 0.0 && self.residual_gain(a) < 0.1 * plan.ig
        })
    }

    /// Gain still available from the viewpoints the agent has not passed.
    fn residual_gain(&self, agent: &AgentState) -> f64 {
        let Some(plan) = &agent.plan else { return 0.0 };
        let ds = plan.path.ds.max(1);
        let first = agent.progress.div_ceil(ds);
        let mut rest = plan.path.clone();
        rest.viewpoints = rest.viewpoints.split_off(first.min(rest.viewpoints.len()));
        gain(&rest, &self.grid, &ClaimedCells::new(), agent.spec.fov_range, GainMode::Union, None)
    }

    fn replan(&mut self) {
        let specs: Vec<AgentSpec> = self.agents.iter().map(|a| a.spec).collect();
        let poses: Vec<Pose> = self.agents.iter().map(|a| a.pose).collect();
        let elapsed = timer();
        let mut waypoints = collect_waypoints(&self.grid, &self.selection.waypoints);
        if waypoints.is_empty() && self.target.as_ref().is_some_and(|t| !t.found) {
            // Map fully explored but the target was missed: head for the most
            // likely target cell.
            waypoints.push(Waypoint { cell: self.belief.argmax(), kind: WaypointKind::Local });
        }
        let incumbents: Vec<Option<Cell>> =
            self.agents.iter().map(|a| a.plan.as_ref().and_then(|p| p.goal).map(|w| w.cell)).collect();
        let round = plan_round_committed(&specs, &poses, &self.grid, waypoints, &incumbents, &self.selection, Some(&self.belief))
            .expect("agents, poses and ranks validated with the scenario");
        self.metrics.plan_latency.push(elapsed());
        self.metrics.plan_rounds += 1;
        for agent in &mut self.agents {
            agent.plan = round.for_agent(agent.spec.id).cloned();
            agent.progress = 0;
            agent.stalled = 0;
        }
        self.last_round = Some(round);
    }

    fn move_agents(&mut self) {
        let dims = *self.grid.dims();
        for i in 0..self.agents.len() {
            let goal = {
                let agent = &mut self.agents[i];
                advance_progress(agent, &dims, self.dwa.lookahead);
                let cells = agent.path_cells();
                if cells.is_empty() {
                    continue;
                }
                let last = cells.len() - 1;
                let near = (agent.progress + 1).min(last);
                let far = (agent.progress + self.dwa.lookahead).min(last);
                let k = (near..=far)
                    .rev()
                    .find(|&k| line_of_sight(&self.grid, &agent.pose, dims.center_of(cells[k])))
                    .unwrap_or(near);
                dims.center_of(cells[k])
            };
            let agent = &self.agents[i];
            let (v, w) = dwa_control(agent, goal, &self.grid, self.dt, &self.dwa);
            let next = integrate(&agent.pose, v, w, self.dt);
            let agent = &mut self.agents[i];
            match next.cell(&dims) {
                Some(c) if !self.truth.contains(c) && !self.grid.is_occupied(c) => {
                    agent.pose = next;
                    agent.v = v;
                }
                _ => {
                    agent.pose.heading = next.heading;
                    agent.v = 0.0;
                }
            }
            agent.w = w;
        }
    }

    fn move_target(&mut self) {
        let Some(t) = self.target.as_mut() else { return };
        if t.found && self.mode == Mode::Single {
            return;
        }
        if let MotionModel::ConstVel { .. } = t.model {
            let dims = *self.grid.dims();
            let bounds = [(dims.width - 1) as f64, (dims.height - 1) as f64];
            let mut pos = t.position;
            let mut vel = t.velocity;
            for axis in 0..2 {
                pos[axis] += vel[axis];
                if pos[axis] < 0.0 {
                    pos[axis] = -pos[axis];
                    vel[axis] = -vel[axis];
                }
                if pos[axis] > bounds[axis] {
                    pos[axis] = 2.0 * bounds[axis] - pos[axis];
                    vel[axis] = -vel[axis];
                }
                pos[axis] = pos[axis].clamp(0.0, bounds[axis]);
            }
            let cell = Cell::new(pos[0].round() as usize, pos[1].round() as usize);
            if self.truth.contains(cell) {
                t.velocity = [-t.velocity[0], -t.velocity[1]];
            } else {
                t.position = pos;
                t.velocity = vel;
                t.cell = cell;
            }
        }
    }

    fn record(&mut self) {
        self.clock += 1;
        let h = self.grid.total_entropy();
        self.metrics.entropy.push(h);
        for (traj, agent) in self.metrics.trajectories.iter_mut().zip(&self.agents) {
            traj.push(agent.pose);
        }
        self.metrics.entropy_reduction_rate = (self.metrics.initial_entropy - h) / self.clock as f64;
    }
}

/// Moves `progress` to the furthest nearby path index matching the agent's
/// current cell.
fn advance_progress(agent: &mut AgentState, dims: &crate::gridworld::GridDims, lookahead: usize) {
    let Some(here) = agent.pose.cell(dims) else { return };
    let cells = agent.path_cells();
    if cells.is_empty() {
        return;
    }
    let end = (agent.progress + lookahead + 2).min(cells.len() - 1);
    let found = (agent.progress..=end).rev().find(|&k| cells[k] == here);
    match found {
        Some(k) if k > agent.progress => {
            agent.progress = k;
            agent.stalled = 0;
        }
        _ => agent.stalled += 1,
    }
}

/// True when the straight segment from the pose to `to` crosses no
/// known-occupied cell.
fn line_of_sight(grid: &OccupancyGrid, from: &Pose, to: (f64, f64)) -> bool {
    let dims = grid.dims();
    let (dx, dy) = (to.0 - from.x, to.1 - from.y);
    let n = ((dx.hypot(dy) / (0.1 * dims.resolution)).ceil() as usize).max(1);
    (0..=n).all(|i| {
        let t = i as f64 / n as f64;
        dims.cell_at(from.x + t * dx, from.y + t * dy)
            .is_some_and(|c| !grid.is_occupied(c))
    })
}

#[cfg(not(target_arch = "wasm32"))]
fn timer() -> impl FnOnce() -> f64 {
    let start = std::time::Instant::now();
    move || start.elapsed().as_secs_f64()
}

#[cfg(target_arch = "wasm32")]
fn timer() -> impl FnOnce() -> f64 {
    || 0.0
}

/// Unicycle update over one step: turn, then advance along the new heading.
pub fn integrate(pose: &Pose, v: f64, w: f64, dt: f64) -> Pose {
    let heading = pose.heading + w * dt;
    Pose::new(pose.x + v * heading.cos() * dt, pose.y + v * heading.sin() * dt, heading)
}

fn lerp(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

/// Samples the reachable velocity window, drops pairs whose forward arc
/// enters a known-occupied cell or leaves the map, and returns the pair with
/// the best weighted heading/clearance/velocity score. When every pair
/// collides the agent stops and turns in place.
pub fn dwa_control(agent: &AgentState, goal: (f64, f64), grid: &OccupancyGrid, dt: f64, cfg: &DwaConfig) -> (f64, f64) {
    let dims = grid.dims();
    let v_lo = (agent.v - cfg.max_accel * dt).max(0.0);
    let v_hi = (agent.v + cfg.max_accel * dt).min(agent.max_speed);
    let w_lo = (agent.w - cfg.max_yaw_accel * dt).max(-cfg.max_yaw_rate);
    let w_hi = (agent.w + cfg.max_yaw_accel * dt).min(cfg.max_yaw_rate);

    // Known obstacles near enough to matter for any arc.
    let reach = agent.max_speed * cfg.sim_horizon + cfg.clearance_cap + dims.resolution;
    let r_cells = (reach / dims.resolution).ceil() as isize;
    let mut nearby = Vec::new();
    if let Some(here) = agent.pose.cell(dims) {
        for dx in -r_cells..=r_cells {
            for dy in -r_cells..=r_cells {
                let (x, y) = (here.x as isize + dx, here.y as isize + dy);
                if x < 0 || y < 0 {
                    continue;
                }
                let c = Cell::new(x as usize, y as usize);
                if dims.contains(c) && grid.is_occupied(c) {
                    nearby.push(dims.center_of(c));
                }
            }
        }
    }
    let half = dims.resolution / 2.0;
    let clearance_at = |px: f64, py: f64| {
        nearby
            .iter()
            .map(|&(cx, cy)| {
                let dx = ((px - cx).abs() - half).max(0.0);
                let dy = ((py - cy).abs() - half).max(0.0);
                dx.hypot(dy)
            })
            .fold(f64::INFINITY, f64::min)
    };

    let rollout_steps = ((cfg.sim_horizon / dt).round() as usize).max(1);
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..cfg.v_samples {
        let v = lerp(v_lo, v_hi, i, cfg.v_samples);
        for j in 0..cfg.w_samples {
            let w = lerp(w_lo, w_hi, j, cfg.w_samples);
            let mut pose = agent.pose;
            let mut clearance = f64::INFINITY;
            let mut collides = false;
            for _ in 0..rollout_steps {
                pose = integrate(&pose, v, w, dt);
                match pose.cell(dims) {
                    Some(c) if !grid.is_occupied(c) => {}
                    _ => {
                        collides = true;
                        break;
                    }
                }
                clearance = clearance.min(clearance_at(pose.x, pose.y));
            }
            if collides {
                continue;
            }
            let (gx, gy) = (goal.0 - pose.x, goal.1 - pose.y);
            let heading = if gx.hypot(gy) < 1e-9 {
                1.0
            } else {
                let err = normalize_angle(gy.atan2(gx) - pose.heading).abs();
                (PI - err) / PI
            };
            let clear = clearance.min(cfg.clearance_cap) / cfg.clearance_cap;
            let speed = if agent.max_speed > 0.0 { v / agent.max_speed } else { 0.0 };
            let score = cfg.heading_weight * heading + cfg.clearance_weight * clear + cfg.velocity_weight * speed;
            if best.is_none_or(|(s, _, _)| score > s) {
                best = Some((score, v, w));
            }
        }
    }
    best.map(|(_, v, w)| (v, w)).unwrap_or((0.0, cfg.max_yaw_accel * dt))
}

/// Runs a scenario to termination.
pub fn run(scenario: &ScenarioConfig, seed: u64) -> Result<Metrics> {
    let mut world = World::new(scenario, seed)?;
    while !world.is_done() {
        world.step();
    }
    Ok(world.into_metrics())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::GridDims;

    fn agent_at(x: f64, y: f64, heading: f64, v: f64) -> AgentState {
        let mut a = AgentState::new(AgentSpec::default(), 1.0, Pose::new(x, y, heading));
        a.v = v;
        a
    }

    fn free_grid(w: usize, h: usize) -> OccupancyGrid {
        let d = GridDims::new(w, h, 1.0).unwrap();
        OccupancyGrid::from_values(d, vec![0.0; w * h]).unwrap()
    }

    #[test]
    fn dwa_goes_straight_toward_goal_ahead() {
        let grid = free_grid(10, 10);
        let a = agent_at(2.5, 5.5, 0.0, 0.0);
        let cfg = DwaConfig::default();
        let (v, w) = dwa_control(&a, (7.5, 5.5), &grid, 0.1, &cfg);
        assert!(v > 0.0);
        let step = cfg.max_yaw_accel * 0.1 * 2.0 / (cfg.w_samples - 1) as f64;
        assert!(w.abs() < step / 2.0, "w = {w}");
    }

    #[test]
    fn dwa_turns_toward_goal_behind() {
        let grid = free_grid(10, 10);
        let a = agent_at(5.5, 5.5, 0.0, 0.0);
        let (_, w) = dwa_control(&a, (1.5, 5.5), &grid, 0.1, &DwaConfig::default());
        assert!(w.abs() > 0.0);
    }

    #[test]
    fn dwa_never_picks_a_colliding_arc() {
        let d = GridDims::new(10, 10, 1.0).unwrap();
        let mut vals = vec![0.0; 100];
        for y in 0..10 {
            vals[y * 10 + 6] = 1.0;
        }
        let grid = OccupancyGrid::from_values(d, vals).unwrap();
        let cfg = DwaConfig::default();
        let a = agent_at(5.2, 5.5, 0.0, 1.0);
        let (v, w) = dwa_control(&a, (9.5, 5.5), &grid, 0.1, &cfg);
        let mut pose = a.pose;
        for _ in 0..10 {
            pose = integrate(&pose, v, w, 0.1);
            assert!(!grid.is_occupied(pose.cell(&d).unwrap()));
        }
        // Inside an obstacle every arc collides: stop and rotate.
        let trapped = agent_at(6.5, 5.5, 0.0, 0.0);
        assert_eq!(dwa_control(&trapped, (9.5, 5.5), &grid, 0.1, &cfg), (0.0, cfg.max_yaw_accel * 0.1));
    }

    #[test]
    fn max_steps_zero_yields_empty_metrics() {
        let mut s = ScenarioConfig::minimal(5, 5);
        s.max_steps = 0;
        let m = run(&s, 1).unwrap();
        assert!(m.entropy.is_empty());
        assert!(m.trajectories.iter().all(Vec::is_empty));
        assert_eq!(m.search_time, None);
    }

    #[test]
    fn found_target_is_absorbing() {
        let s = ScenarioConfig::from_json(
            r#"{"map": {"width": 5, "height": 5},
                "agents": [{"start": [2, 2], "sensor": {"p_detect": 1.0}}],
                "target": {"start": [3, 3]}}"#,
        )
        .unwrap();
        let mut world = World::new(&s, 0).unwrap();
        world.step();
        assert!(world.found());
        assert_eq!(world.metrics().search_time, Some(1));
        let grid = world.grid.clone();
        let poses: Vec<Pose> = world.agents.iter().map(|a| a.pose).collect();
        world.step();
        assert_eq!(world.clock, 2);
        assert_eq!(world.grid, grid);
        assert_eq!(world.agents.iter().map(|a| a.pose).collect::<Vec<_>>(), poses);
        assert_eq!(world.metrics().trajectories[0].len(), 2);
    }

    #[test]
    fn moving_target_reflects_off_walls() {
        let s = ScenarioConfig::from_json(
            r#"{"map": {"width": 4, "height": 3},
                "agents": [{"start": [0, 0], "fov_range": 0}],
                "target": {"start": [2, 1], "motion": {"kind": "const_vel", "velocity": [1.0, 0.0]}},
                "mode": "continuous", "max_steps": 4}"#,
        )
        .unwrap();
        let mut world = World::new(&s, 0).unwrap();
        let mut xs = Vec::new();
        for _ in 0..4 {
            world.step();
            xs.push(world.target.as_ref().unwrap().cell.x);
        }
        assert_eq!(xs, vec![3, 2, 1, 0]);
    }
}
