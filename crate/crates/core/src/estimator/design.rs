use crate::geometry::{unit_direction, StimulusField, Vec2};
use crate::trajectory::TrajectoryDataset;
use crate::{Error, Result};

use super::EstimatorConfig;

/// Regressors of individual `i` given everyone's positions at one frame:
/// unit directions toward each neighbor (ascending ID, `i` skipped) and the
/// local stimulus direction.
///
/// The simulator drives its velocities through this same function.
pub fn regressors(
    positions: &[Vec2],
    field: &StimulusField,
    i: usize,
    frame: usize,
) -> (Vec<Vec2>, Vec2) {
    let here = positions[i];
    let neighbors = positions
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &p)| unit_direction(here, p))
        .collect();
    (neighbors, field.direction(here, frame))
}

/// Stacked regression problem for one individual in one window.
///
/// Each sample contributes two rows (x then y). Penalized columns are the
/// neighbor directions in ascending ID followed by the stimulus direction;
/// the autonomous block is two implicit unpenalized indicator columns
/// (1 on x rows, 1 on y rows) and is never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    samples: usize,
    target: Vec<f64>,
    columns: Vec<Vec<f64>>,
}

impl DesignMatrix {
    /// Builds a design from per-sample vectors. `neighbor_columns[c][s]` is
    /// neighbor column `c` at sample `s`.
    pub fn from_samples(
        targets: &[Vec2],
        neighbor_columns: &[Vec<Vec2>],
        stimulus_column: &[Vec2],
    ) -> Result<Self> {
        let samples = targets.len();
        if samples == 0 {
            return Err(Error::input("design has no samples"));
        }
        let flatten = |col: &[Vec2]| -> Result<Vec<f64>> {
            if col.len() != samples {
                return Err(Error::input(format!(
                    "design column has {} samples, expected {samples}",
                    col.len()
                )));
            }
            Ok(col.iter().flat_map(|v| [v.x, v.y]).collect())
        };
        let mut columns = neighbor_columns
            .iter()
            .map(|c| flatten(c))
            .collect::<Result<Vec<_>>>()?;
        columns.push(flatten(stimulus_column)?);
        Ok(DesignMatrix {
            samples,
            target: flatten(targets)?,
            columns,
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn rows(&self) -> usize {
        2 * self.samples
    }

    /// Number of penalized columns (neighbors plus stimulus).
    pub fn penalized_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_neighbors(&self) -> usize {
        self.columns.len() - 1
    }

    /// Penalized column `c` as interleaved `x, y` rows.
    pub fn column(&self, c: usize) -> &[f64] {
        &self.columns[c]
    }

    pub fn stimulus_column(&self) -> &[f64] {
        &self.columns[self.columns.len() - 1]
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn is_finite(&self) -> bool {
        self.target
            .iter()
            .chain(self.columns.iter().flatten())
            .all(|v| v.is_finite())
    }

    /// Penalized objective `1/2 |y - X w - b|^2 + lambda * sum(w)` evaluated from the rows.
    pub fn objective(&self, coefs: &[f64], autonomous: Vec2, lambda: f64) -> f64 {
        let mut rss = 0.0;
        for row in 0..self.rows() {
            let offset = if row % 2 == 0 { autonomous.x } else { autonomous.y };
            let fitted: f64 = self
                .columns
                .iter()
                .zip(coefs)
                .map(|(col, w)| col[row] * w)
                .sum::<f64>()
                + offset;
            let r = self.target[row] - fitted;
            rss += r * r;
        }
        0.5 * rss + lambda * coefs.iter().sum::<f64>()
    }
}

/// Design for individual `i` in window `k`: samples `t` in
/// `[k, k + L - lag)`, regressors at `t`, target the velocity at `t + lag`.
pub fn build_design(
    dataset: &TrajectoryDataset,
    field: &StimulusField,
    i: usize,
    k: usize,
    config: &EstimatorConfig,
) -> Result<DesignMatrix> {
    config.validate()?;
    let n = dataset.num_individuals();
    if i >= n {
        return Err(Error::range(format!("individual {i} with {n} individuals")));
    }
    let lag = config.lag_frames;
    let len = config.window_len;
    // The last target velocity reads frame k + len.
    if k + len >= dataset.num_frames() {
        return Err(Error::range(format!(
            "window {k} of length {len} does not fit in {} frames",
            dataset.num_frames()
        )));
    }
    let samples = len - lag;
    let mut targets = Vec::with_capacity(samples);
    let mut neighbor_columns = vec![Vec::with_capacity(samples); n - 1];
    let mut stimulus = Vec::with_capacity(samples);
    for t in k..k + samples {
        let (dirs, s) = regressors(dataset.frame(t), field, i, t);
        for (col, d) in neighbor_columns.iter_mut().zip(dirs) {
            col.push(d);
        }
        stimulus.push(s);
        targets.push(dataset.velocity(i, t + lag, config.velocity_scheme)?);
    }
    DesignMatrix::from_samples(&targets, &neighbor_columns, &stimulus)
}
