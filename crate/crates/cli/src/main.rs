use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use infosearch::scenario::load_scenario;
use infosearch::sim::Mode;
use infosearch_cli::{cmd_batch, cmd_run, parse_counts, parse_seeds, CliError, RunOptions, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "infosearch", version, about = "Multi-agent information-driven target search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Single,
    Continuous,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Single => Mode::Single,
            ModeArg::Continuous => Mode::Continuous,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write metrics, trajectories and snapshots.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Override the team size.
        #[arg(long)]
        agents: Option<usize>,
        /// Snapshot the map and belief every N steps (0: final state only).
        #[arg(long, default_value_t = 0)]
        snapshot_every: u64,
        /// Also write trajectories.svg.
        #[arg(long)]
        plot: bool,
        /// Also write rounds.txt with every planning round's candidates.
        #[arg(long)]
        debug_rounds: bool,
    },
    /// Run many seeds and team sizes in parallel and aggregate the results.
    Batch {
        #[arg(long)]
        scenario: PathBuf,
        /// `0..20`, `1..=5` or `1,2,3`.
        #[arg(long, default_value = "0..20")]
        seeds: String,
        /// Comma-separated team sizes; defaults to the scenario's own.
        #[arg(long)]
        agents: Option<String>,
        #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
        out: PathBuf,
    },
    /// Parse and validate a scenario file.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { scenario, seed, out, mode, max_steps, agents, snapshot_every, plot, debug_rounds } => {
            let cfg = load_scenario(&scenario)?;
            let opts = RunOptions {
                seed,
                out: out.clone(),
                mode: mode.map(Mode::from),
                max_steps,
                agents,
                snapshot_every,
                plot,
                debug_rounds,
            };
            let res = cmd_run(&cfg, &opts)?;
            let m = &res.metrics;
            println!(
                "{}: {} steps, found={}, search_time={}, final_entropy={:.3} -> {}",
                cfg.name,
                m.steps(),
                res.found,
                m.search_time.map(|t| t.to_string()).unwrap_or_else(|| "-".into()),
                m.final_entropy(),
                out.display()
            );
        }
        Command::Batch { scenario, seeds, agents, out } => {
            let cfg = load_scenario(&scenario)?;
            let seeds = parse_seeds(&seeds)?;
            let counts = match agents {
                Some(a) => parse_counts(&a)?,
                None => vec![cfg.agents.len()],
            };
            let fmt = |x: Option<f64>| x.map(|v| format!("{v:.1}")).unwrap_or_else(|| "-".into());
            println!("agents  runs  found  mean_T   std_T   p50_ms  p90_ms  p99_ms");
            for s in cmd_batch(&cfg, &seeds, &counts, &out)? {
                println!(
                    "{:>6}  {:>4}  {:>5}  {:>6}  {:>6}  {:>6.2}  {:>6.2}  {:>6.2}",
                    s.agents,
                    s.runs,
                    s.found,
                    fmt(s.mean_search_time),
                    fmt(s.std_search_time),
                    s.latency_p50 * 1e3,
                    s.latency_p90 * 1e3,
                    s.latency_p99 * 1e3
                );
            }
        }
        Command::Validate { scenario } => {
            let cfg = load_scenario(&scenario)?;
            println!("{}: ok ({} agents, {}x{})", cfg.name, cfg.agents.len(), cfg.map.width, cfg.map.height);
        }
    }
    Ok(())
}
