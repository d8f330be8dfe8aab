//! Fixtures shared by the benchmarks.

use schoolnet::simulator::builtin_scenario;
use schoolnet::{simulate, EstimatorConfig, StimulusField, TrajectoryDataset};

/// The leader scene with its default noise, and the estimator settings of a
/// real-time run: N = 5, L = 30, lag 3.
pub fn leader_fixture() -> (TrajectoryDataset, StimulusField, EstimatorConfig) {
    let spec = builtin_scenario("leader").expect("leader is a builtin");
    let (ds, _) = simulate(&spec).expect("builtin scenes simulate");
    let cfg = EstimatorConfig {
        lag_frames: 3,
        window_len: 30,
        ..Default::default()
    };
    (ds, spec.stimulus, cfg)
}
