use std::fmt::Write as _;
use std::path::Path;

use infosearch::scenario::ScenarioConfig;
use infosearch::sim::run;
use rayon::prelude::*;
use serde::Serialize;

use crate::manifest::ArtifactWriter;
use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchRow {
    pub agents: usize,
    pub seed: u64,
    pub steps: u64,
    pub search_time: Option<u64>,
    pub final_entropy: f64,
    pub entropy_reduction_rate: f64,
    pub plan_rounds: u64,
    #[serde(skip)]
    pub plan_latency: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub agents: usize,
    pub runs: usize,
    pub found: usize,
    /// Over runs where the target was found.
    pub mean_search_time: Option<f64>,
    pub std_search_time: Option<f64>,
    pub mean_final_entropy: f64,
    pub latency_p50: f64,
    pub latency_p90: f64,
    pub latency_p99: f64,
}

/// Accepts `a..b` (exclusive), `a..=b`, or a comma-separated list.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || CliError::Usage(format!("invalid seed list `{text}`"));
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let seeds: Vec<u64> = match b.strip_prefix('=') {
            Some(b) => (a..=b.trim().parse().map_err(|_| bad())?).collect(),
            None => (a..b.trim().parse().map_err(|_| bad())?).collect(),
        };
        if seeds.is_empty() {
            return Err(bad());
        }
        return Ok(seeds);
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

pub fn parse_counts(text: &str) -> Result<Vec<usize>> {
    let counts: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| CliError::Usage(format!("invalid agent count list `{text}`"))))
        .collect::<Result<_>>()?;
    if counts.contains(&0) {
        return Err(CliError::Usage("agent counts must be >= 1".into()));
    }
    Ok(counts)
}

pub fn run_batch(scenario: &ScenarioConfig, seeds: &[u64], counts: &[usize]) -> Result<Vec<BatchRow>> {
    let scenarios: Vec<(usize, ScenarioConfig)> =
        counts.iter().map(|&n| Ok((n, scenario.with_agent_count(n, 0)?))).collect::<Result<_>>()?;
    let jobs: Vec<(usize, &ScenarioConfig, u64)> =
        scenarios.iter().flat_map(|(n, s)| seeds.iter().map(move |&seed| (*n, s, seed))).collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(agents, s, seed)| {
            let m = run(s, seed)?;
            Ok(BatchRow {
                agents,
                seed,
                steps: m.steps(),
                search_time: m.search_time,
                final_entropy: m.final_entropy(),
                entropy_reduction_rate: m.entropy_reduction_rate,
                plan_rounds: m.plan_rounds,
                plan_latency: m.plan_latency,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.agents, r.seed));
    Ok(rows)
}

/// Nearest-rank percentile of an unsorted sample.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q / 100.0) * v.len() as f64).ceil() as usize;
    v[rank.clamp(1, v.len()) - 1]
}

pub fn summarize(rows: &[BatchRow]) -> Vec<BatchSummary> {
    let mut counts: Vec<usize> = rows.iter().map(|r| r.agents).collect();
    counts.dedup();
    counts
        .into_iter()
        .map(|agents| {
            let group: Vec<&BatchRow> = rows.iter().filter(|r| r.agents == agents).collect();
            let times: Vec<f64> = group.iter().filter_map(|r| r.search_time).map(|t| t as f64).collect();
            let (mean, std) = if times.is_empty() {
                (None, None)
            } else {
                let n = times.len() as f64;
                let mean = times.iter().sum::<f64>() / n;
                let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
                (Some(mean), Some(var.sqrt()))
            };
            let latency: Vec<f64> = group.iter().flat_map(|r| r.plan_latency.iter().copied()).collect();
            BatchSummary {
                agents,
                runs: group.len(),
                found: times.len(),
                mean_search_time: mean,
                std_search_time: std,
                mean_final_entropy: group.iter().map(|r| r.final_entropy).sum::<f64>() / group.len() as f64,
                latency_p50: percentile(&latency, 50.0),
                latency_p90: percentile(&latency, 90.0),
                latency_p99: percentile(&latency, 99.0),
            }
        })
        .collect()
}

/// Runs every (agent count, seed) pair and writes `batch.csv` plus
/// `batch_summary.json` under `out`.
pub fn cmd_batch(scenario: &ScenarioConfig, seeds: &[u64], counts: &[usize], out: &Path) -> Result<Vec<BatchSummary>> {
    let rows = run_batch(scenario, seeds, counts)?;
    let summary = summarize(&rows);
    let mut w = ArtifactWriter::new(out)?;
    let mut csv = String::from("agents,seed,steps,search_time,final_entropy,entropy_reduction_rate,plan_rounds\n");
    for r in &rows {
        let t = r.search_time.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{t},{:.6},{:.6},{}",
            r.agents, r.seed, r.steps, r.final_entropy, r.entropy_reduction_rate, r.plan_rounds
        );
    }
    w.write("batch.csv", csv.as_bytes())?;
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    w.write("batch_summary.json", text.as_bytes())?;
    w.finish()?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("1..=3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seeds("5, 9").unwrap(), vec![5, 9]);
        assert!(parse_seeds("3..3").is_err());
        assert!(parse_seeds("x").is_err());
        assert!(parse_counts("1,0").is_err());
    }

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile(&v, 50.0), 5.0);
        assert_eq!(percentile(&v, 90.0), 9.0);
        assert_eq!(percentile(&v, 99.0), 10.0);
        assert_eq!(percentile(&[], 50.0), 0.0);
    }
}
