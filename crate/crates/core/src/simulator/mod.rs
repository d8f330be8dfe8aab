//! Forward model: planted attraction, autonomous, and stimulus weights drive
//! a group of individuals through a bounded arena.
//!
//! The velocity at frame `f` (the forward difference `p[f+1] - p[f]`) is
//!
//! ```text
//! v_i = sum_{j != i} w_ij * u_ij + w_ii * d_i + w_i^stim * s_i + eps_i
//! ```
//!
//! with `u_ij` and `s_i` evaluated at frame `f - lag` (frame 0 while
//! `f < lag`) under the parameters scheduled for that frame, and
//! `eps_i ~ N(0, sigma^2 I)`. Positions are clamped into the arena.

mod noise;
mod scenarios;

pub use noise::NoiseSource;
pub use scenarios::{builtin_scenario, builtin_scenarios, BUILTIN_NAMES};

use serde::{Deserialize, Serialize};

use crate::estimate::{EstimateSeries, WeightMatrix, WindowEstimate};
use crate::estimator::regressors;
use crate::geometry::{StimulusField, Vec2};
use crate::trajectory::TrajectoryDataset;
use crate::{Error, Result};

/// Axis-aligned box positions are clamped into.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub min: Vec2,
    pub max: Vec2,
}

impl Arena {
    pub fn square(side: f64) -> Self {
        Arena {
            min: Vec2::ZERO,
            max: Vec2::new(side, side),
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn clamp(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
        )
    }
}

/// Planted parameters over the frame range `[start, end)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub start: usize,
    pub end: usize,
    /// Attraction weights off the diagonal, autonomous magnitudes on it.
    pub weights: WeightMatrix,
    pub stim_weights: Vec<f64>,
    pub preferred_dirs: Vec<Vec2>,
}

impl Regime {
    fn as_estimate(&self, window_index: usize) -> WindowEstimate {
        WindowEstimate {
            window_index,
            weights: self.weights.clone(),
            stim_weights: self.stim_weights.clone(),
            preferred_dirs: self.preferred_dirs.clone(),
        }
    }

    /// Noise-free velocity of individual `i` given everyone's positions at
    /// the regressor frame.
    pub fn drift(&self, positions: &[Vec2], field: &StimulusField, i: usize, frame: usize) -> Vec2 {
        let (dirs, s) = regressors(positions, field, i, frame);
        let others = (0..positions.len()).filter(|&j| j != i);
        let mut v = self.preferred_dirs[i] * self.weights.get(i, i) + s * self.stim_weights[i];
        for (j, d) in others.zip(dirs) {
            v += d * self.weights.get(i, j);
        }
        v
    }
}

/// A complete synthetic scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub num_individuals: usize,
    pub num_frames: usize,
    /// Seconds per frame, recorded in the generated dataset.
    pub frame_period: f64,
    pub length_unit: String,
    pub initial_positions: Vec<Vec2>,
    /// Contiguous regimes covering `[0, num_frames)` in order.
    pub schedule: Vec<Regime>,
    pub stimulus: StimulusField,
    /// Standard deviation of each noise component, length units per frame.
    pub noise_sigma: f64,
    pub lag_frames: usize,
    /// Window length used to report the planted parameters per window.
    pub window_len: usize,
    pub seed: u64,
    pub arena: Arena,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.num_individuals;
        if n < 2 || self.num_frames < 2 {
            return Err(Error::config(format!(
                "scenario {:?} needs at least 2 individuals and 2 frames",
                self.name
            )));
        }
        if self.initial_positions.len() != n {
            return Err(Error::config(format!(
                "{} initial positions for {n} individuals",
                self.initial_positions.len()
            )));
        }
        if let Some(p) = self.initial_positions.iter().find(|p| !self.arena.contains(**p)) {
            return Err(Error::config(format!("initial position {p:?} lies outside the arena")));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::config(format!(
                "noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if !(self.frame_period > 0.0) {
            return Err(Error::config("frame_period must be positive"));
        }
        if self.lag_frames < 1 || self.window_len <= self.lag_frames {
            return Err(Error::config(format!(
                "need 1 <= lag_frames < window_len, got lag {} and window {}",
                self.lag_frames, self.window_len
            )));
        }
        self.stimulus.validate()?;
        let mut expected_start = 0;
        for (r, regime) in self.schedule.iter().enumerate() {
            if regime.start != expected_start || regime.end <= regime.start {
                return Err(Error::config(format!(
                    "schedule gap or overlap at regime {r}: expected start {expected_start}, got [{}, {})",
                    regime.start, regime.end
                )));
            }
            expected_start = regime.end;
            if regime.weights.dim() != n {
                return Err(Error::config(format!("regime {r} weight matrix is not {n}x{n}")));
            }
            regime.as_estimate(0).validate().map_err(|e| {
                Error::config(format!("regime {r}: {e}"))
            })?;
        }
        if expected_start != self.num_frames {
            return Err(Error::config(format!(
                "schedule covers [0, {expected_start}) but the scene has {} frames",
                self.num_frames
            )));
        }
        Ok(())
    }

    /// Regime in force at `frame`.
    pub fn regime_at(&self, frame: usize) -> &Regime {
        let idx = self.schedule.partition_point(|r| r.end <= frame);
        &self.schedule[idx.min(self.schedule.len() - 1)]
    }

    /// Planted parameters per sliding window, taken at the central sample frame.
    pub fn true_series(&self) -> EstimateSeries {
        let samples = self.window_len - self.lag_frames;
        let windows = (self.num_frames + 1).saturating_sub(self.window_len + self.lag_frames);
        (0..windows)
            .map(|k| self.regime_at(k + samples / 2).as_estimate(k))
            .collect::<Vec<_>>()
            .into()
    }
}

/// Positions at frame `f + 1` given the history up to frame `f`.
pub fn step(history: &[Vec<Vec2>], spec: &ScenarioSpec, noise: &mut NoiseSource) -> Vec<Vec2> {
    let f = history.len() - 1;
    let feature_frame = f.saturating_sub(spec.lag_frames);
    let regime = spec.regime_at(feature_frame);
    let features = &history[feature_frame];
    let current = &history[f];
    (0..current.len())
        .map(|i| {
            let v = regime.drift(features, &spec.stimulus, i, feature_frame) + noise.sample(i);
            spec.arena.clamp(current[i] + v)
        })
        .collect()
}

/// Runs the scene, returning the trajectories and the planted parameters per window.
pub fn simulate(spec: &ScenarioSpec) -> Result<(TrajectoryDataset, EstimateSeries)> {
    spec.validate()?;
    let mut noise = NoiseSource::new(spec.seed, spec.num_individuals, spec.noise_sigma);
    let mut history = Vec::with_capacity(spec.num_frames);
    history.push(spec.initial_positions.clone());
    while history.len() < spec.num_frames {
        let next = step(&history, spec, &mut noise);
        history.push(next);
    }
    let dataset = TrajectoryDataset::new(history, spec.frame_period, spec.length_unit.clone())?;
    Ok((dataset, spec.true_series()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Sense;

    fn two_body(weights: [[f64; 2]; 2], stim: [f64; 2], p2: Vec2) -> ScenarioSpec {
        let weights = WeightMatrix::try_from(weights.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap();
        let preferred_dirs = (0..2)
            .map(|i| if weights.get(i, i) > 0.0 { Vec2::new(1.0, 0.0) } else { Vec2::ZERO })
            .collect();
        ScenarioSpec {
            name: "two-body".into(),
            num_individuals: 2,
            num_frames: 50,
            frame_period: 1.0 / 60.0,
            length_unit: "cm".into(),
            initial_positions: vec![Vec2::new(0.0, 0.0), p2],
            schedule: vec![Regime {
                start: 0,
                end: 50,
                weights,
                stim_weights: stim.to_vec(),
                preferred_dirs,
            }],
            stimulus: StimulusField::Rotating {
                center: Vec2::new(-5.0, 0.0),
                angular_speed_deg_per_frame: 1.144,
                sense: Sense::Counterclockwise,
            },
            noise_sigma: 0.0,
            lag_frames: 1,
            window_len: 10,
            seed: 1,
            arena: Arena {
                min: Vec2::new(-100.0, -100.0),
                max: Vec2::new(100.0, 100.0),
            },
        }
    }

    #[test]
    fn single_attraction_step() {
        let spec = two_body([[0.0, 1.0], [0.0, 0.0]], [0.0, 0.0], Vec2::new(3.0, 4.0));
        let mut noise = NoiseSource::new(spec.seed, 2, 0.0);
        let next = step(&[spec.initial_positions.clone()], &spec, &mut noise);
        assert_eq!(next[0], Vec2::new(0.6, 0.8));
        assert_eq!(next[1], Vec2::new(3.0, 4.0));
    }

    #[test]
    fn null_dynamics_stay_put() {
        let spec = two_body([[0.0; 2]; 2], [0.0, 0.0], Vec2::new(3.0, 4.0));
        let (ds, _) = simulate(&spec).unwrap();
        for row in ds.frames() {
            assert_eq!(row, &spec.initial_positions[..]);
        }
    }

    #[test]
    fn stimulus_only_moves_along_tangent() {
        let spec = two_body([[0.0; 2]; 2], [1.0, 1.0], Vec2::new(3.0, 4.0));
        let (ds, _) = simulate(&spec).unwrap();
        for t in 0..ds.num_frames() - 1 {
            for i in 0..2 {
                let feature_frame = t.saturating_sub(1);
                let s = spec.stimulus.direction(ds.position(feature_frame, i), feature_frame);
                let dp = ds.position(t + 1, i) - ds.position(t, i);
                assert!((dp.norm() - 1.0).abs() < 1e-12);
                assert!((dp - s).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn clamping_keeps_positions_inside() {
        let mut spec = two_body([[0.0; 2]; 2], [0.0, 0.0], Vec2::new(3.0, 4.0));
        spec.noise_sigma = 5.0;
        spec.arena = Arena::square(10.0);
        spec.initial_positions = vec![Vec2::new(1.0, 1.0), Vec2::new(9.0, 9.0)];
        let (ds, _) = simulate(&spec).unwrap();
        assert!(ds.frames().flatten().all(|p| spec.arena.contains(*p)));
    }

    #[test]
    fn schedule_gap_is_a_config_error() {
        let mut spec = two_body([[0.0; 2]; 2], [0.0, 0.0], Vec2::new(3.0, 4.0));
        let mut second = spec.schedule[0].clone();
        spec.schedule[0].end = 20;
        second.start = 25;
        spec.schedule.push(second);
        assert!(matches!(simulate(&spec), Err(Error::Config(_))));
        spec.schedule[1].start = 20;
        assert!(simulate(&spec).is_ok());
        spec.schedule[1].end = 40;
        assert!(matches!(simulate(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn constant_schedule_gives_identical_truth() {
        let spec = two_body([[0.2, 1.0], [0.5, 0.0]], [0.3, 0.1], Vec2::new(3.0, 4.0));
        let (_, truth) = simulate(&spec).unwrap();
        assert_eq!(truth.len(), 50 - 10 - 1 + 1);
        for (k, w) in truth.iter().enumerate() {
            assert_eq!(w.window_index, k);
            assert_eq!(w.weights, truth.windows()[0].weights);
            assert_eq!(w.stim_weights, vec![0.3, 0.1]);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut spec = two_body([[0.2, 1.0], [0.5, 0.0]], [0.3, 0.1], Vec2::new(3.0, 4.0));
        spec.noise_sigma = 0.1;
        let (a, _) = simulate(&spec).unwrap();
        let (b, _) = simulate(&spec).unwrap();
        assert_eq!(a, b);
        spec.seed = 2;
        let (c, _) = simulate(&spec).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = two_body([[0.2, 1.0], [0.5, 0.0]], [0.3, 0.1], Vec2::new(3.0, 4.0));
        let json = serde_json::to_string(&spec).unwrap();
        let back: ScenarioSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }
}
