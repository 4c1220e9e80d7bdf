//! Benchmark fixtures shared by the criterion targets.

use ptlattice::scenario::{ScenarioConfig, Simulation};

/// Controlled four-well ramp scenario.
pub fn four_well() -> ScenarioConfig {
    ScenarioConfig::from_json(
        r#"{
        "version": 1,
        "wells": 4,
        "embedded_left": 2,
        "gamma": { "shape": "ramp", "target": 0.5, "ramp_time": 20.0 },
        "d_strategy": { "kind": "constant", "value": 1.0 },
        "reservoir": { "kind": "level-out" },
        "initial_state": { "kind": "populations", "populations": [10.0, 0.5, 0.5, 10.0] },
        "integrator": { "dt": 1e-3, "t_end": 20.0 },
        "output": { "dir": "out", "sample_stride": 100 }
    }"#,
    )
    .expect("valid fixture")
}

/// Tilted-lattice scenario with 300 wells.
pub fn lattice_300() -> ScenarioConfig {
    ScenarioConfig::from_json(
        r#"{
        "version": 1,
        "wells": 300,
        "embedded_left": 150,
        "gamma": { "shape": "ramp", "target": 0.3, "ramp_time": 40.0 },
        "d_strategy": { "kind": "compensating" },
        "reservoir": { "kind": "stark-lattice" },
        "initial_state": { "kind": "gaussian-packet", "center": 150.5, "momentum": 0.0, "width": 0.017 },
        "integrator": { "dt": 1e-3, "t_end": 40.0 },
        "output": { "dir": "out", "sample_stride": 100 }
    }"#,
    )
    .expect("valid fixture")
}

pub fn simulation(config: &ScenarioConfig) -> Simulation {
    Simulation::from_config(config).expect("valid fixture")
}
