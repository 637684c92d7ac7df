use std::fmt::Write as _;
use std::path::PathBuf;

use infosearch::scenario::ScenarioConfig;
use infosearch::sim::{Metrics, Mode, World};
use serde::Serialize;

use crate::manifest::{ArtifactWriter, Manifest};
use crate::plot::trajectory_svg;
use crate::Result;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub out: PathBuf,
    pub mode: Option<Mode>,
    pub max_steps: Option<u64>,
    pub agents: Option<usize>,
    /// Write map and belief snapshots every N steps; 0 writes only the final pair.
    pub snapshot_every: u64,
    pub plot: bool,
    /// Append each planning round's candidate table to `rounds.txt`.
    pub debug_rounds: bool,
}

impl RunOptions {
    pub fn new(seed: u64, out: impl Into<PathBuf>) -> Self {
        Self {
            seed,
            out: out.into(),
            mode: None,
            max_steps: None,
            agents: None,
            snapshot_every: 0,
            plot: false,
            debug_rounds: false,
        }
    }

    /// The scenario with command-line overrides applied and re-validated.
    pub fn apply(&self, scenario: &ScenarioConfig) -> Result<ScenarioConfig> {
        let mut s = match self.agents {
            Some(n) => scenario.with_agent_count(n, self.seed)?,
            None => scenario.clone(),
        };
        if let Some(mode) = self.mode {
            s.mode = mode;
        }
        if let Some(n) = self.max_steps {
            s.max_steps = n;
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Serialize)]
struct StepRecord<'a> {
    clock: u64,
    total_entropy: f64,
    found: bool,
    agents: &'a [AgentRecord],
}

#[derive(Debug, Serialize)]
struct AgentRecord {
    id: usize,
    x: f64,
    y: f64,
    theta: f64,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    scenario: &'a str,
    seed: u64,
    mode: Mode,
    agents: usize,
    steps: u64,
    found: bool,
    search_time: Option<u64>,
    initial_entropy: f64,
    final_entropy: f64,
    entropy_reduction_rate: f64,
    plan_rounds: u64,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub metrics: Metrics,
    pub manifest: Manifest,
    pub found: bool,
}

pub fn cmd_run(scenario: &ScenarioConfig, opts: &RunOptions) -> Result<RunArtifacts> {
    let scenario = opts.apply(scenario)?;
    let mut world = World::new(&scenario, opts.seed)?;
    let mut out = ArtifactWriter::new(&opts.out)?;

    let mut jsonl = String::new();
    let mut csv = String::from("step,agent,x,y,theta\n");
    let mut rounds = String::new();
    let mut seen_rounds = 0;

    while !world.is_done() {
        world.step();
        let clock = world.clock;
        let agents: Vec<AgentRecord> = world
            .agents
            .iter()
            .enumerate()
            .map(|(id, a)| AgentRecord { id, x: a.pose.x, y: a.pose.y, theta: a.pose.heading })
            .collect();
        for a in &agents {
            let _ = writeln!(csv, "{clock},{},{:.6},{:.6},{:.6}", a.id, a.x, a.y, a.theta);
        }
        let record = StepRecord { clock, total_entropy: world.grid.total_entropy(), found: world.found(), agents: &agents };
        jsonl.push_str(&serde_json::to_string(&record).expect("step record serializes"));
        jsonl.push('\n');

        if opts.debug_rounds && world.metrics().plan_rounds > seen_rounds {
            seen_rounds = world.metrics().plan_rounds;
            if let Some(round) = world.last_round() {
                let _ = writeln!(rounds, "== step {clock} round {seen_rounds}");
                rounds.push_str(&round.debug_dump());
            }
        }
        if opts.snapshot_every > 0 && clock % opts.snapshot_every == 0 {
            write_snapshots(&mut out, &world, clock)?;
        }
    }
    if opts.snapshot_every == 0 || world.clock % opts.snapshot_every != 0 {
        write_snapshots(&mut out, &world, world.clock)?;
    }

    out.write("metrics.jsonl", jsonl.as_bytes())?;
    out.write("trajectory.csv", csv.as_bytes())?;
    if opts.debug_rounds {
        out.write("rounds.txt", rounds.as_bytes())?;
    }
    if opts.plot {
        let target = world.target.as_ref().map(|t| (t.cell.x as f64, t.cell.y as f64));
        let svg = trajectory_svg(&world.grid, &world.truth, &world.metrics().trajectories, target);
        out.write("trajectories.svg", svg.as_bytes())?;
    }

    let found = world.found();
    let metrics = world.into_metrics();
    let summary = Summary {
        scenario: &scenario.name,
        seed: opts.seed,
        mode: scenario.mode,
        agents: scenario.agents.len(),
        steps: metrics.steps(),
        found,
        search_time: metrics.search_time,
        initial_entropy: metrics.initial_entropy,
        final_entropy: metrics.final_entropy(),
        entropy_reduction_rate: metrics.entropy_reduction_rate,
        plan_rounds: metrics.plan_rounds,
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    out.write("summary.json", text.as_bytes())?;
    let manifest = out.finish()?;
    Ok(RunArtifacts { metrics, manifest, found })
}

fn write_snapshots(out: &mut ArtifactWriter, world: &World, clock: u64) -> Result<()> {
    out.write(&format!("snapshots/map_{clock:06}.pgm"), &world.grid.to_pgm(true))?;
    out.write(&format!("snapshots/belief_{clock:06}.pgm"), &world.belief.to_pgm(true))?;
    Ok(())
}
