//! The opt-in bracket-memory law on the shipped variant scenarios.

use std::path::Path;

use ulocal_core::{run_closed_loop, ControllerConfig, GainMemory, ScenarioFile};

fn load(stem: &str) -> ScenarioFile {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/variants");
    ScenarioFile::load(dir.join(format!("{stem}.json"))).unwrap()
}

#[test]
fn variants_parse_and_use_bracket_memory() {
    for i in 3..=9 {
        let f = load(&format!("fig{i}_bracket"));
        let ControllerConfig::IstarPi(c) = f.controller else { panic!("fig{i}: not i*-PI") };
        assert_eq!(c.memory, GainMemory::Bracket);
        f.to_scenario().unwrap();
    }
}

#[test]
fn bracket_memory_tracks_sigma1() {
    let sc = load("fig3_bracket").to_scenario().unwrap();
    let m = run_closed_loop(&sc).unwrap().metrics;
    assert!(!m.diverged);
    let settled = m.settling_time.expect("enters and stays in the 2% band");
    assert!(settled < 5e-3, "{settled}");
    assert!(m.max_abs_u < 2.0);
}

#[test]
fn literal_law_does_not_track_sigma1() {
    let mut f = load("fig3_bracket");
    let ControllerConfig::IstarPi(ref mut c) = f.controller else { unreachable!() };
    c.memory = GainMemory::Output;
    let m = run_closed_loop(&f.to_scenario().unwrap()).unwrap().metrics;
    assert!(m.settling_time.is_none());
}
