//! Information gain, utility and the rank-ordered planning round.
//!
//! Agents plan one after another in hierarchy order. Each winner's viewpoint
//! footprints are added to a claimed-cell mask, and lower-ranked agents score
//! candidates with those cells removed, which spreads the team out without
//! any joint optimization.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::belief::{SensorModel, TargetBelief};
use crate::error::{Error, Result};
use crate::gridworld::{binary_entropy, fov_around, Cell, GridDims, OccupancyGrid, Pose};
use crate::planner::{astar, reparameterize, ReparamPath};
use crate::waypoints::{collect_waypoints, Waypoint, WaypointConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub id: usize,
    /// Hierarchy position, 0 is the leader.
    pub rank: usize,
    /// Cells per planning step.
    pub speed: f64,
    /// Half-width of the square footprint, in cells.
    pub fov_range: usize,
    pub sensor: SensorModel,
}

impl Default for AgentSpec {
    fn default() -> Self {
        Self { id: 0, rank: 0, speed: 1.0, fov_range: 2, sensor: SensorModel::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainMode {
    /// Each covered cell counts once.
    #[default]
    Union,
    /// Footprints are summed per viewpoint; overlapping cells count repeatedly.
    PerViewpointSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainWeighting {
    /// Plain occupancy entropy.
    #[default]
    Occupancy,
    /// Entropy scaled by target mass relative to the most likely cell.
    BeliefWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    /// Cost weight in bits per planning step at unit speed.
    pub lambda: f64,
    /// Planning horizon in planning steps.
    pub horizon: usize,
    /// Planning steps between consecutive viewpoints.
    pub sample_period: f64,
    pub gain_mode: GainMode,
    pub weighting: GainWeighting,
    pub waypoints: WaypointConfig,
    /// Utility an agent's current goal may trail the best rival by and
    /// still be kept. Only applies when incumbents are passed in.
    pub switch_margin: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            horizon: 20,
            sample_period: 2.0,
            gain_mode: GainMode::Union,
            weighting: GainWeighting::Occupancy,
            waypoints: WaypointConfig::default(),
            switch_margin: 4.0,
        }
    }
}

/// Cells already covered by higher-ranked agents this round.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClaimedCells {
    cells: BTreeSet<Cell>,
}

impl ClaimedCells {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.cells.contains(&c)
    }

    pub fn extend(&mut self, cells: impl IntoIterator<Item = Cell>) {
        self.cells.extend(cells);
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().copied()
    }
}

impl FromIterator<Cell> for ClaimedCells {
    fn from_iter<T: IntoIterator<Item = Cell>>(iter: T) -> Self {
        Self { cells: iter.into_iter().collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub agent: usize,
    /// `None` for the hold-position fallback.
    pub goal: Option<Waypoint>,
    pub path: ReparamPath,
    pub ig: f64,
    pub cost: f64,
    pub utility: f64,
}

impl Candidate {
    pub fn new(agent: usize, goal: Option<Waypoint>, path: ReparamPath, ig: f64, cost: f64) -> Self {
        Self { agent, goal, path, ig, cost, utility: ig - cost }
    }

    pub fn hold(agent: usize, at: Cell) -> Self {
        Self::new(agent, None, ReparamPath::hold(at), 0.0, 0.0)
    }

    pub fn is_hold(&self) -> bool {
        self.goal.is_none()
    }
}

/// Union of the footprints at every viewpoint.
pub fn coverage(rp: &ReparamPath, fov_range: usize, dims: &GridDims) -> BTreeSet<Cell> {
    rp.viewpoints
        .iter()
        .flat_map(|&v| fov_around(v, fov_range, dims).cells().to_vec())
        .collect()
}

/// Occupancy entropy of the union of viewpoint footprints, claimed cells
/// excluded.
pub fn information_gain(rp: &ReparamPath, grid: &OccupancyGrid, claimed: &ClaimedCells, fov_range: usize) -> f64 {
    gain(rp, grid, claimed, fov_range, GainMode::Union, None)
}

/// Information gain with explicit aggregation mode and optional belief
/// weighting.
pub fn gain(
    rp: &ReparamPath,
    grid: &OccupancyGrid,
    claimed: &ClaimedCells,
    fov_range: usize,
    mode: GainMode,
    belief: Option<&TargetBelief>,
) -> f64 {
    let dims = grid.dims();
    let scale = belief.map(|b| (b, b.max_mass()));
    let value = |c: Cell| {
        let h = binary_entropy(grid.get(c));
        match scale {
            Some((b, max)) if max > 0.0 => h * b.mass(c) / max,
            Some(_) => 0.0,
            None => h,
        }
    };
    match mode {
        GainMode::Union => coverage(rp, fov_range, dims)
            .into_iter()
            .filter(|c| !claimed.contains(*c))
            .map(value)
            .sum(),
        GainMode::PerViewpointSum => rp
            .viewpoints
            .iter()
            .map(|&v| {
                fov_around(v, fov_range, dims)
                    .cells()
                    .iter()
                    .filter(|c| !claimed.contains(**c))
                    .map(|&c| value(c))
                    .sum::<f64>()
            })
            .sum(),
    }
}

/// Weighted travel time `lambda * steps / speed`.
pub fn path_cost(rp: &ReparamPath, spec: &AgentSpec, lambda: f64) -> f64 {
    if rp.steps() == 0 || lambda == 0.0 {
        return 0.0;
    }
    lambda * rp.steps() as f64 / spec.speed
}

/// Highest utility; ties go to lower cost, then to the earlier candidate.
pub fn select_path(candidates: &[Candidate]) -> Result<&Candidate> {
    let mut best: Option<&Candidate> = None;
    for c in candidates {
        best = match best {
            None => Some(c),
            Some(b) if c.utility > b.utility || (c.utility == b.utility && c.cost < b.cost) => Some(c),
            keep => keep,
        };
    }
    best.ok_or(Error::NoCandidate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanRound {
    /// One selection per agent, in rank order.
    pub selections: Vec<Candidate>,
    /// Every scored candidate per agent, in rank order.
    pub candidates: Vec<Vec<Candidate>>,
    pub waypoints: Vec<Waypoint>,
    /// Claimed cells after the last agent.
    pub claimed: ClaimedCells,
}

impl PlanRound {
    /// Selection for agent `id`.
    pub fn for_agent(&self, id: usize) -> Option<&Candidate> {
        self.selections.iter().find(|c| c.agent == id)
    }

    /// One line per scored candidate: agent, goal, ig, cost, utility.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for (sel, cands) in self.selections.iter().zip(&self.candidates) {
            for c in cands {
                let goal = c
                    .goal
                    .map(|w| format!("({},{}) {:?}", w.cell.x, w.cell.y, w.kind))
                    .unwrap_or_else(|| "hold".into());
                let mark = if c == sel { " *" } else { "" };
                let _ = writeln!(
                    out,
                    "agent={} goal={} ig={:.6} cost={:.6} utility={:.6}{}",
                    c.agent, goal, c.ig, c.cost, c.utility, mark
                );
            }
        }
        out
    }
}

/// Agents in rank order; fails unless ranks are a permutation of `0..n`.
pub fn rank_order(agents: &[AgentSpec]) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..agents.len()).collect();
    order.sort_by_key(|&i| agents[i].rank);
    for (pos, &i) in order.iter().enumerate() {
        if agents[i].rank != pos {
            return Err(Error::domain(format!(
                "agent ranks must be a permutation of 0..{}",
                agents.len()
            )));
        }
    }
    Ok(order)
}

/// One full hierarchical round over freshly sampled waypoints.
pub fn plan_round(
    agents: &[AgentSpec],
    poses: &[Pose],
    grid: &OccupancyGrid,
    config: &SelectionConfig,
    belief: Option<&TargetBelief>,
) -> Result<PlanRound> {
    let waypoints = collect_waypoints(grid, &config.waypoints);
    plan_round_with(agents, poses, grid, waypoints, config, belief)
}

/// Planning round over a given waypoint set.
pub fn plan_round_with(
    agents: &[AgentSpec],
    poses: &[Pose],
    grid: &OccupancyGrid,
    waypoints: Vec<Waypoint>,
    config: &SelectionConfig,
    belief: Option<&TargetBelief>,
) -> Result<PlanRound> {
    plan_round_committed(agents, poses, grid, waypoints, &vec![None; agents.len()], config, belief)
}

/// Best candidate, unless the candidate heading to the incumbent goal is
/// within `margin` of it. A waypoint within two cells of the incumbent counts
/// as the same goal, since frontier centroids drift as the map fills in.
fn select_committed(candidates: &[Candidate], incumbent: Option<Cell>, margin: f64) -> Result<&Candidate> {
    let best = select_path(candidates)?;
    let Some(goal) = incumbent else { return Ok(best) };
    let kept = candidates
        .iter()
        .filter_map(|c| Some((c.goal?.cell.manhattan(goal), c)))
        .filter(|(d, _)| *d <= 2)
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c);
    Ok(match kept {
        Some(c) if c.ig > 0.0 && c.utility + margin >= best.utility => c,
        _ => best,
    })
}

/// Planning round in which each agent (indexed like `agents`) prefers to keep
/// its incumbent goal; see [`SelectionConfig::switch_margin`]. Greedy
/// re-selection from a slightly moved pose otherwise flips between
/// near-equal goals and the agent never reaches either.
pub fn plan_round_committed(
    agents: &[AgentSpec],
    poses: &[Pose],
    grid: &OccupancyGrid,
    waypoints: Vec<Waypoint>,
    incumbents: &[Option<Cell>],
    config: &SelectionConfig,
    belief: Option<&TargetBelief>,
) -> Result<PlanRound> {
    if agents.is_empty() {
        return Err(Error::domain("planning round needs at least one agent"));
    }
    if agents.len() != poses.len() || agents.len() != incumbents.len() {
        return Err(Error::domain("one pose and one incumbent per agent required"));
    }
    let order = rank_order(agents)?;
    let dims = *grid.dims();
    let weights = match config.weighting {
        GainWeighting::Occupancy => None,
        GainWeighting::BeliefWeighted => belief,
    };
    // Stale waypoints on cells now known to be occupied are dropped.
    let live: Vec<Waypoint> = waypoints.iter().copied().filter(|w| !grid.is_occupied(w.cell)).collect();

    let mut claimed = ClaimedCells::new();
    let mut selections = Vec::with_capacity(agents.len());
    let mut all = Vec::with_capacity(agents.len());
    for i in order {
        let spec = &agents[i];
        let start = poses[i]
            .cell(&dims)
            .ok_or_else(|| Error::domain(format!("agent {} pose outside map", spec.id)))?;
        let candidates: Vec<Candidate> = live
            .iter()
            .filter_map(|w| {
                let path = astar(grid, start, w.cell).ok()?;
                let rp = reparameterize(&path, spec, config.horizon, config.sample_period);
                let ig = gain(&rp, grid, &claimed, spec.fov_range, config.gain_mode, weights);
                let cost = path_cost(&rp, spec, config.lambda);
                Some(Candidate::new(spec.id, Some(*w), rp, ig, cost))
            })
            .collect();
        let chosen = match select_committed(&candidates, incumbents[i], config.switch_margin) {
            Ok(c) => c.clone(),
            Err(_) => Candidate::hold(spec.id, start),
        };
        claimed.extend(coverage(&chosen.path, spec.fov_range, &dims));
        selections.push(chosen);
        all.push(candidates);
    }
    Ok(PlanRound { selections, candidates: all, waypoints, claimed })
}
