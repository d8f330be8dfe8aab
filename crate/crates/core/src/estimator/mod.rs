//! Sliding-window estimation of attraction, stimulus, and autonomous terms.
//!
//! For individual `i` and window `k`, each sample frame `t` regresses the
//! velocity at `t + lag` on the unit directions toward every neighbor at `t`,
//! the stimulus direction at `t`, and a free constant 2-vector. Neighbor and
//! stimulus weights are constrained non-negative and L1-penalized; the
//! constant vector is unpenalized and is split into `w_ii * d_i` afterwards.

mod design;
mod oracle;
mod solver;

pub use design::{build_design, regressors, DesignMatrix};
pub use oracle::{oracle_fit, ORACLE_MAX_COLUMNS};
pub use solver::{fit_window, lambda_max, FitResult};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimate::{decompose_autonomous, EstimateSeries, WeightMatrix, WindowEstimate};
use crate::geometry::{StimulusField, Vec2};
use crate::trajectory::{TrajectoryDataset, VelocityScheme};
use crate::{Error, Result};

/// Sparsity penalty selection.
///
/// In JSON a bare number is a fixed penalty and `{"relative_to_max": r}`
/// scales each window's own `lambda_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Penalty {
    Fixed(f64),
    Relative { relative_to_max: f64 },
}

impl Penalty {
    pub fn resolve(&self, design: &DesignMatrix) -> f64 {
        match *self {
            Penalty::Fixed(l) => l,
            Penalty::Relative { relative_to_max } => relative_to_max * lambda_max(design),
        }
    }

    fn value(&self) -> f64 {
        match *self {
            Penalty::Fixed(l) => l,
            Penalty::Relative { relative_to_max } => relative_to_max,
        }
    }
}

impl Default for Penalty {
    fn default() -> Self {
        Penalty::Relative {
            relative_to_max: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Response lag in frames between regressors and the velocity they predict.
    pub lag_frames: usize,
    /// Frames per window; a window yields `window_len - lag_frames` samples.
    pub window_len: usize,
    pub lambda: Penalty,
    pub solver_tol: f64,
    pub max_iters: usize,
    pub velocity_scheme: VelocityScheme,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            lag_frames: 3,
            window_len: 30,
            lambda: Penalty::default(),
            solver_tol: 1e-10,
            max_iters: 100_000,
            velocity_scheme: VelocityScheme::Forward,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lag_frames < 1 {
            return Err(Error::config("lag_frames must be at least 1"));
        }
        if self.window_len <= self.lag_frames {
            return Err(Error::config(format!(
                "window_len ({}) must exceed lag_frames ({})",
                self.window_len, self.lag_frames
            )));
        }
        let l = self.lambda.value();
        if !(l >= 0.0 && l.is_finite()) {
            return Err(Error::config(format!("lambda must be non-negative, got {l}")));
        }
        if !(self.solver_tol > 0.0) {
            return Err(Error::config("solver_tol must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be positive"));
        }
        Ok(())
    }

    /// Number of sliding windows over `num_frames` frames.
    pub fn num_windows(&self, num_frames: usize) -> usize {
        (num_frames + 1).saturating_sub(self.window_len + self.lag_frames)
    }
}

/// Fits individual `i` in window `k`.
pub fn fit_individual(
    dataset: &TrajectoryDataset,
    field: &StimulusField,
    i: usize,
    k: usize,
    config: &EstimatorConfig,
) -> Result<FitResult> {
    let design = build_design(dataset, field, i, k, config)?;
    let lambda = config.lambda.resolve(&design);
    fit_window(&design, lambda, config.solver_tol, config.max_iters)
}

fn assemble(k: usize, fits: &[FitResult]) -> WindowEstimate {
    let n = fits.len();
    let mut weights = WeightMatrix::zeros(n);
    let mut stim_weights = Vec::with_capacity(n);
    let mut preferred_dirs = Vec::with_capacity(n);
    for (i, fit) in fits.iter().enumerate() {
        let others = (0..n).filter(|&j| j != i);
        for (j, &w) in others.zip(&fit.neighbor_weights) {
            weights.set(i, j, w);
        }
        let (w_ii, d) = decompose_autonomous(fit.autonomous);
        // Below the coincidence threshold the direction is undefined; report no autonomy.
        weights.set(i, i, if d == Vec2::ZERO { 0.0 } else { w_ii });
        stim_weights.push(fit.stim_weight);
        preferred_dirs.push(d);
    }
    WindowEstimate {
        window_index: k,
        weights,
        stim_weights,
        preferred_dirs,
    }
}

/// Estimates all individuals in window `k`.
pub fn estimate_window(
    dataset: &TrajectoryDataset,
    field: &StimulusField,
    k: usize,
    config: &EstimatorConfig,
) -> Result<WindowEstimate> {
    let fits = (0..dataset.num_individuals())
        .map(|i| fit_individual(dataset, field, i, k, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(k, &fits))
}

/// Estimates every window `k = 0 ..= T - L - lag`.
///
/// (window, individual) fits run on the current rayon pool; the output order
/// does not depend on scheduling.
pub fn estimate_series(
    dataset: &TrajectoryDataset,
    field: &StimulusField,
    config: &EstimatorConfig,
) -> Result<EstimateSeries> {
    config.validate()?;
    field.validate()?;
    let n = dataset.num_individuals();
    let windows = config.num_windows(dataset.num_frames());
    if windows == 0 {
        return Err(Error::input(format!(
            "{} frames are too few for window_len {} and lag {}",
            dataset.num_frames(),
            config.window_len,
            config.lag_frames
        )));
    }
    if config.window_len < 2 * (n + 1) {
        log::warn!(
            "window_len {} is short for {n} individuals; at least {} is recommended",
            config.window_len,
            2 * (n + 1)
        );
    }
    let fits = (0..windows * n)
        .into_par_iter()
        .map(|idx| fit_individual(dataset, field, idx % n, idx / n, config))
        .collect::<Result<Vec<_>>>()?;
    let unconverged = fits.iter().filter(|f| !f.converged).count();
    if unconverged > 0 {
        log::warn!("{unconverged} of {} window fits hit max_iters", fits.len());
    }
    Ok(fits
        .chunks(n)
        .enumerate()
        .map(|(k, chunk)| assemble(k, chunk))
        .collect::<Vec<_>>()
        .into())
}
