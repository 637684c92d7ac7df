use infosearch_web::{preset, preset_names, Demo};
use serde_json::Value;

fn demo(name: &str, seed: u32) -> Demo {
    Demo::parse(&preset(name).unwrap(), seed).unwrap()
}

#[test]
fn every_preset_loads() {
    let names = preset_names();
    assert_eq!(names.split(',').count(), 8);
    for name in names.split(',') {
        let d = demo(name, 0);
        assert_eq!(d.occupancy().len(), d.width() * d.height());
        assert_eq!(d.belief().len(), d.width() * d.height());
        assert_eq!(d.poses().len(), 3 * d.agent_count());
    }
    assert!(preset("nope").is_none());
}

#[test]
fn stepping_matches_the_core_simulator() {
    let mut d = demo("fig4", 3);
    let done = d.step(40);
    let mut reference = infosearch::sim::World::new(&infosearch::scenario::ScenarioConfig::from_json(&preset("fig4").unwrap()).unwrap(), 3).unwrap();
    for _ in 0..40 {
        if reference.is_done() {
            break;
        }
        reference.step();
    }
    assert_eq!(done, reference.is_done());
    assert_eq!(d.clock() as u64, reference.clock);
    assert_eq!(d.occupancy(), reference.grid.values());
    assert_eq!(d.trajectory(0).len(), 2 * d.clock() as usize);
}

#[test]
fn reset_restores_the_initial_state() {
    let mut d = demo("fig2a", 1);
    let before = (d.occupancy(), d.poses());
    d.step(25);
    assert_ne!(d.occupancy(), before.0);
    d.reset(1);
    assert_eq!(d.clock(), 0);
    assert_eq!((d.occupancy(), d.poses()), before);
}

#[test]
fn placed_target_is_found_where_it_was_put() {
    let mut d = demo("fig4", 0);
    d.try_place_target(6, 11).unwrap();
    assert_eq!(d.target(), vec![6.5, 11.5, 0.0]);
    d.step(3000);
    assert!(d.found());
    assert_eq!(d.target()[..2], [6.5, 11.5]);

    let truth = d.truth();
    let blocked = truth.iter().position(|&b| b == 1).unwrap();
    let (x, y) = (blocked % d.width(), blocked / d.width());
    assert!(d.try_place_target(x, y).unwrap_err().contains("obstacle"));
    assert!(d.try_place_target(99, 0).is_err());
}

#[test]
fn team_size_can_change_and_keeps_the_target() {
    let mut d = demo("fig4", 0);
    d.try_place_target(2, 9).unwrap();
    d.try_set_agents(5).unwrap();
    assert_eq!(d.agent_count(), 5);
    assert_eq!(d.target()[..2], [2.5, 9.5]);
    d.try_set_agents(1).unwrap();
    assert_eq!(d.agent_count(), 1);
    assert!(d.try_set_agents(0).is_err());
}

#[test]
fn plan_json_lists_one_selection_per_agent() {
    let mut d = demo("fig2b", 0);
    assert_eq!(d.plan_json(), "null");
    d.step(1);
    let plan: Value = serde_json::from_str(&d.plan_json()).unwrap();
    let agents = plan["agents"].as_array().unwrap();
    assert_eq!(agents.len(), d.agent_count());
    for a in agents {
        let cands = a["candidates"].as_array().unwrap();
        assert!(cands.iter().filter(|c| c["selected"] == true).count() <= 1);
        for c in cands {
            let u = c["utility"].as_f64().unwrap();
            let ig = c["ig"].as_f64().unwrap();
            let cost = c["cost"].as_f64().unwrap();
            assert!((u - (ig - cost)).abs() < 1e-9);
        }
    }
    assert!(!plan["waypoints"].as_array().unwrap().is_empty());
}

#[test]
fn bad_json_is_reported() {
    assert!(Demo::parse("{", 0).is_err());
    assert!(Demo::parse(r#"{"map": {"width": 0, "height": 3}, "agents": [{"start": [0, 0]}]}"#, 0).is_err());
}
