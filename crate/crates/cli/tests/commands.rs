use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use infosearch::scenario::{load_scenario, ScenarioConfig};
use infosearch::sim::Mode;
use infosearch_cli::batch::{run_batch, summarize};
use infosearch_cli::manifest::{sha256_hex, verify, Manifest};
use infosearch_cli::{cmd_batch, cmd_run, CliError, RunOptions};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_infosearch"))
}

fn read_manifest(dir: &Path) -> Manifest {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn same_seed_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_scenario(scenario("fig2a")).unwrap();
    for i in 0..2 {
        let mut opts = RunOptions::new(7, tmp.path().join(i.to_string()));
        opts.plot = true;
        opts.snapshot_every = 100;
        cmd_run(&cfg, &opts).unwrap();
    }
    let a = read_manifest(&tmp.path().join("0"));
    let b = read_manifest(&tmp.path().join("1"));
    assert!(a.files.len() >= 5);
    assert_eq!(a, b);
}

#[test]
fn continuous_mode_runs_exact_step_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_scenario(scenario("fig3b")).unwrap();
    let mut opts = RunOptions::new(1, tmp.path());
    opts.mode = Some(Mode::Continuous);
    opts.max_steps = Some(500);
    let res = cmd_run(&cfg, &opts).unwrap();
    assert_eq!(res.metrics.entropy.len(), 500);

    let text = fs::read_to_string(tmp.path().join("metrics.jsonl")).unwrap();
    let records: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 500);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["clock"], i as u64 + 1);
        assert!(r["total_entropy"].is_f64());
        assert_eq!(r["agents"].as_array().unwrap().len(), cfg.agents.len());
    }
}

#[test]
fn ten_agent_run_has_ten_trajectory_streams() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_scenario(scenario("fig2d")).unwrap();
    let mut opts = RunOptions::new(0, tmp.path());
    opts.max_steps = Some(50);
    opts.plot = true;
    cmd_run(&cfg, &opts).unwrap();

    let csv = fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,agent,x,y,theta"));
    let agents: std::collections::BTreeSet<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(agents.len(), 10);
    assert_eq!(csv.lines().count(), 1 + 10 * 50);

    let svg = fs::read_to_string(tmp.path().join("trajectories.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 10);
}

#[test]
fn manifest_hashes_match_every_emitted_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_scenario(scenario("fig4")).unwrap();
    let mut opts = RunOptions::new(3, tmp.path());
    opts.plot = true;
    opts.debug_rounds = true;
    opts.snapshot_every = 10;
    let res = cmd_run(&cfg, &opts).unwrap();
    assert_eq!(res.manifest, read_manifest(tmp.path()));
    assert!(verify(tmp.path(), &res.manifest).is_empty());

    // Every file on disk except the manifest itself is listed.
    let mut on_disk = Vec::new();
    for dir in [tmp.path().to_path_buf(), tmp.path().join("snapshots")] {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_file() && p.file_name().unwrap() != "manifest.json" {
                on_disk.push(p.strip_prefix(tmp.path()).unwrap().to_string_lossy().replace('\\', "/"));
            }
        }
    }
    on_disk.sort();
    let listed: Vec<String> = res.manifest.files.iter().map(|f| f.path.clone()).collect();
    assert_eq!(listed, on_disk);
    for f in &res.manifest.files {
        assert_eq!(sha256_hex(&fs::read(tmp.path().join(&f.path)).unwrap()), f.sha256);
    }
}

#[test]
fn snapshots_are_graymaps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_scenario(scenario("fig2a")).unwrap();
    let mut opts = RunOptions::new(0, tmp.path());
    opts.max_steps = Some(30);
    opts.snapshot_every = 10;
    cmd_run(&cfg, &opts).unwrap();
    for step in [10, 20, 30] {
        let map = fs::read(tmp.path().join(format!("snapshots/map_{step:06}.pgm"))).unwrap();
        assert!(map.starts_with(b"P5\n13 13\n255\n"));
        assert_eq!(map.len(), b"P5\n13 13\n255\n".len() + 169);
        assert!(tmp.path().join(format!("snapshots/belief_{step:06}.pgm")).exists());
    }
}

#[test]
fn validate_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = bin().args(["validate", "--scenario"]).arg(scenario("ahg")).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let dup = tmp.path().join("dup.json");
    fs::write(
        &dup,
        r#"{"map": {"width": 5, "height": 5}, "agents": [{"start": [0, 0], "rank": 0}, {"start": [1, 1], "rank": 0}]}"#,
    )
    .unwrap();
    let out = bin().args(["validate", "--scenario"]).arg(&dup).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("agents[1].rank"));

    let garbled = tmp.path().join("garbled.json");
    fs::write(&garbled, "{ map: ").unwrap();
    let out = bin().args(["validate", "--scenario"]).arg(&garbled).output().unwrap();
    assert_eq!(out.status.code(), Some(4));

    let out = bin().args(["validate", "--scenario"]).arg(tmp.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = ScenarioConfig::minimal(5, 5);
    let err = cmd_run(&cfg, &RunOptions::new(0, blocker.join("out"))).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn out_dir_defaults_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--max-steps", "5", "--scenario"])
        .arg(scenario("fig2a"))
        .env("INFOSEARCH_OUT", tmp.path().join("env-out"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("env-out/summary.json").exists());
}

#[test]
fn agent_override_changes_team_size() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_scenario(scenario("fig4")).unwrap();
    for n in [1, 5] {
        let mut opts = RunOptions::new(2, tmp.path().join(n.to_string()));
        opts.agents = Some(n);
        opts.max_steps = Some(3);
        let res = cmd_run(&cfg, &opts).unwrap();
        assert_eq!(res.metrics.trajectories.len(), n);
    }
}

#[test]
fn batch_with_one_seed_and_one_count_has_one_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_scenario(scenario("fig4")).unwrap();
    let summary = cmd_batch(&cfg, &[4], &[2], tmp.path()).unwrap();
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0].agents, 2);
    assert_eq!(summary[0].runs, 1);
    let csv = fs::read_to_string(tmp.path().join("batch.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(tmp.path().join("batch_summary.json").exists());
}

#[test]
fn batch_means_do_not_depend_on_seed_order() {
    let cfg = load_scenario(scenario("fig4")).unwrap();
    let forward = summarize(&run_batch(&cfg, &[0, 1, 2, 3, 4, 5], &[1, 3]).unwrap());
    let shuffled = summarize(&run_batch(&cfg, &[5, 2, 0, 4, 1, 3], &[3, 1]).unwrap());
    assert_eq!(forward.len(), 2);
    for (a, b) in forward.iter().zip(&shuffled) {
        assert_eq!(a.agents, b.agents);
        assert_eq!(a.mean_search_time, b.mean_search_time);
        assert_eq!(a.std_search_time, b.std_search_time);
        assert_eq!(a.found, b.found);
    }
}

#[test]
fn scenario_round_trips_through_a_file() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig4", "ahg"] {
        let cfg = load_scenario(scenario(name)).unwrap();
        let path = tmp.path().join(format!("{name}.json"));
        fs::write(&path, cfg.to_json()).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), cfg, "{name}");
    }
}

#[test]
fn shipped_scenarios_match_their_setups() {
    let fig4 = load_scenario(scenario("fig4")).unwrap();
    assert_eq!((fig4.map.width, fig4.map.height), (13, 13));
    assert_eq!(fig4.agents.len(), 3);
    assert!(fig4.agents.iter().all(|a| a.max_speed == 1.0));
    assert!(fig4.target.is_some());

    let sizes: Vec<(usize, usize)> = ["fig2a", "fig2b", "fig2c", "fig2d"]
        .iter()
        .map(|n| {
            let s = load_scenario(scenario(n)).unwrap();
            (s.agents.len(), s.map.width)
        })
        .collect();
    assert_eq!(sizes, [(2, 13), (3, 13), (5, 25), (10, 35)]);

    let ahg = load_scenario(scenario("ahg")).unwrap();
    assert_eq!((ahg.dims().unwrap().width_m(), ahg.dims().unwrap().height_m()), (20.0, 10.0));
    let mut speeds: Vec<f64> = ahg.agents.iter().map(|a| a.max_speed).collect();
    speeds.sort_by(f64::total_cmp);
    assert_eq!(speeds, [0.3, 1.0]);
}

#[test]
fn heterogeneous_apartment_run_reaches_detection() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_scenario(scenario("ahg")).unwrap();
    let res = cmd_run(&cfg, &RunOptions::new(7, tmp.path())).unwrap();
    assert!(res.found);
}

#[test]
fn batch_command_prints_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["batch", "--seeds", "0..3", "--agents", "1,2", "--scenario"])
        .arg(scenario("fig4"))
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 3, "{stdout}");

    let bad = bin().args(["batch", "--seeds", "x", "--scenario"]).arg(scenario("fig4")).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
