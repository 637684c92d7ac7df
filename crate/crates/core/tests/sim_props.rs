use infosearch::belief::{MotionModel, SensorModel};
use infosearch::gridworld::Cell;
use infosearch::scenario::{AgentConfig, RectConfig, ScenarioConfig, TargetConfig, TargetStart};
use infosearch::sim::{run, Mode, World};
use proptest::prelude::*;

fn agent(x: usize, y: usize) -> AgentConfig {
    AgentConfig { start: [x, y], ..ScenarioConfig::minimal(1, 1).agents[0].clone() }
}

/// Small random map with rectangular obstacles, 1-3 agents on free cells and
/// an optional target.
fn arb_scenario() -> impl Strategy<Value = ScenarioConfig> {
    (
        6..=12usize,
        6..=12usize,
        prop::collection::vec((0..12usize, 0..12usize, 1..=3usize, 1..=3usize), 0..4),
        prop::collection::vec((0..12usize, 0..12usize, 1..=3usize), 1..=3),
        prop::option::of((0..12usize, 0..12usize, any::<bool>())),
        any::<bool>(),
    )
        .prop_filter_map("starts must be free", |(w, h, rects, agents, target, continuous)| {
            let mut s = ScenarioConfig::minimal(w, h);
            s.map.obstacles = rects
                .into_iter()
                .map(|(x, y, rw, rh)| RectConfig { x: x % w, y: y % h, w: rw.min(w - x % w), h: rh.min(h - y % h) })
                .collect();
            let truth = s.obstacles().ok()?;
            s.agents = agents
                .iter()
                .map(|&(x, y, fov)| {
                    let mut a = agent(x % w, y % h);
                    a.fov_range = fov;
                    a
                })
                .collect();
            if s.agents.iter().any(|a| truth.contains(Cell::new(a.start[0], a.start[1]))) {
                return None;
            }
            if let Some((x, y, moving)) = target {
                let cell = Cell::new(x % w, y % h);
                if truth.contains(cell) {
                    return None;
                }
                let motion = if moving {
                    MotionModel::ConstVel { velocity: [0.5, 0.0], sigma: 0.3 }
                } else {
                    MotionModel::Static { sigma: 0.0 }
                };
                s.target = Some(TargetConfig { start: TargetStart::Cell([cell.x, cell.y]), motion, belief_motion: None });
            }
            s.mode = if continuous { Mode::Continuous } else { Mode::Single };
            s.max_steps = 300;
            Some(s)
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn runs_are_reproducible(s in arb_scenario(), seed in any::<u64>()) {
        let mut a = run(&s, seed).unwrap();
        let mut b = run(&s, seed).unwrap();
        // Planning latency is wall-clock time; everything else must match.
        prop_assert_eq!(a.plan_latency.len(), b.plan_latency.len());
        a.plan_latency.clear();
        b.plan_latency.clear();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn stepping_respects_world_invariants(s in arb_scenario(), seed in any::<u64>()) {
        let truth = s.obstacles().unwrap();
        let mut world = World::new(&s, seed).unwrap();
        let dims = *world.grid.dims();
        let mut last_entropy = world.grid.total_entropy();
        while !world.is_done() {
            let before: Vec<_> = world.agents.iter().map(|a| (a.pose.cell(&dims).unwrap(), a.spec.fov_range)).collect();
            let target_before = world.target.as_ref().map(|t| t.cell);
            let was_found = world.found();
            world.step();

            for a in &world.agents {
                let c = a.pose.cell(&dims);
                prop_assert!(c.is_some(), "agent left the map");
                prop_assert!(!truth.contains(c.unwrap()), "agent inside an obstacle at {:?}", c);
                prop_assert!(a.v.abs() <= a.max_speed + 1e-9);
            }
            let h = world.grid.total_entropy();
            if s.mode == Mode::Single {
                prop_assert!(h <= last_entropy + 1e-9, "entropy rose {} -> {}", last_entropy, h);
            }
            last_entropy = h;
            if world.found() && !was_found {
                let t = target_before.unwrap();
                prop_assert!(before.iter().any(|(c, r)| c.chebyshev(t) <= *r), "found outside every footprint");
            }
            prop_assert!((world.belief.total() - 1.0).abs() < 1e-9);
            let m = world.metrics();
            prop_assert!(m.trajectories.iter().all(|t| t.len() as u64 == world.clock));
        }
        if s.mode == Mode::Continuous {
            prop_assert_eq!(world.clock, s.max_steps);
        }
    }
}

/// One agent on a free 5x5 map with a perfect sensor must find a static
/// target anywhere. With a 1 m/s agent on 1 m cells and dt = 0.1 s, reaching
/// an adjacent cell takes about 10 steps; allow that for every cell.
#[test]
fn small_free_map_search_time_bound() {
    let bound = 25 * 10;
    for start in [[0, 0], [4, 4], [2, 2], [0, 4]] {
        for tx in 0..5 {
            for ty in 0..5 {
                let mut s = ScenarioConfig::minimal(5, 5);
                s.agents[0].start = start;
                s.agents[0].sensor = SensorModel::new(1.0, 0.0).unwrap();
                s.target = Some(TargetConfig {
                    start: TargetStart::Cell([tx, ty]),
                    motion: MotionModel::Static { sigma: 0.0 },
                    belief_motion: None,
                });
                let m = run(&s, 0).unwrap();
                let t = m.search_time.unwrap_or(u64::MAX);
                assert!(t <= bound, "start {start:?} target ({tx},{ty}): {t}");
            }
        }
    }
}

#[test]
fn target_inside_first_footprint_is_found_in_one_step() {
    let mut s = ScenarioConfig::minimal(9, 9);
    s.agents[0].start = [4, 4];
    s.agents[0].sensor = SensorModel::new(1.0, 0.0).unwrap();
    s.target = Some(TargetConfig { start: TargetStart::Cell([5, 3]), motion: MotionModel::default(), belief_motion: None });
    let m = run(&s, 11).unwrap();
    assert_eq!(m.search_time, Some(1));
    assert_eq!(m.steps(), 1);
}
