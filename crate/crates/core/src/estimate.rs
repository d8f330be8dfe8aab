//! Per-window interaction parameters: the output of the estimator and the
//! ground truth reported by the simulator.

use serde::{Deserialize, Serialize};

use crate::geometry::{Vec2, EPS_COINCIDE};
use crate::trajectory::check_permutation;
use crate::{Error, Result};

/// Square non-negative matrix; `get(i, j)` is the weight of `j` on `i`,
/// the diagonal holds autonomous magnitudes.
///
/// Serialized as nested rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct WeightMatrix {
    n: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(n: usize) -> Self {
        WeightMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Row-major construction; fails unless `data.len() == n * n`.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::input(format!(
                "{} entries for a {n}x{n} weight matrix",
                data.len()
            )));
        }
        Ok(WeightMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, w: f64) {
        self.data[i * self.n + j] = w;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }
}

impl TryFrom<Vec<Vec<f64>>> for WeightMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("weight matrix rows must form a square"));
        }
        WeightMatrix::from_row_major(n, rows.into_iter().flatten().collect())
    }
}

impl From<WeightMatrix> for Vec<Vec<f64>> {
    fn from(m: WeightMatrix) -> Self {
        m.data.chunks(m.n.max(1)).map(<[f64]>::to_vec).collect()
    }
}

/// Parameters of one sliding window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowEstimate {
    pub window_index: usize,
    pub weights: WeightMatrix,
    pub stim_weights: Vec<f64>,
    pub preferred_dirs: Vec<Vec2>,
}

impl WindowEstimate {
    pub fn num_individuals(&self) -> usize {
        self.weights.dim()
    }

    /// Autonomous vector `w_ii * d_i` of individual `i`.
    pub fn autonomous(&self, i: usize) -> Vec2 {
        self.preferred_dirs[i] * self.weights.get(i, i)
    }

    /// Checks non-negativity and the unit/zero convention for preferred directions.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_individuals();
        if self.stim_weights.len() != n || self.preferred_dirs.len() != n {
            return Err(Error::input(format!(
                "window {}: expected {n} stimulus weights and directions",
                self.window_index
            )));
        }
        let all = self.weights.as_row_major().iter().chain(&self.stim_weights);
        if let Some(w) = all.copied().find(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::input(format!(
                "window {}: weight {w} is negative or non-finite",
                self.window_index
            )));
        }
        for (i, d) in self.preferred_dirs.iter().enumerate() {
            let ok = if self.weights.get(i, i) > 0.0 {
                (d.norm() - 1.0).abs() <= 1e-9
            } else {
                *d == Vec2::ZERO
            };
            if !ok {
                return Err(Error::input(format!(
                    "window {}: preferred direction {d:?} of individual {} is inconsistent with w_ii = {}",
                    self.window_index,
                    i + 1,
                    self.weights.get(i, i)
                )));
            }
        }
        Ok(())
    }

    /// Relabels individuals: new individual `a` is old individual `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_individuals();
        check_permutation(perm, n)?;
        let mut weights = WeightMatrix::zeros(n);
        for a in 0..n {
            for b in 0..n {
                weights.set(a, b, self.weights.get(perm[a], perm[b]));
            }
        }
        Ok(WindowEstimate {
            window_index: self.window_index,
            weights,
            stim_weights: perm.iter().map(|&p| self.stim_weights[p]).collect(),
            preferred_dirs: perm.iter().map(|&p| self.preferred_dirs[p]).collect(),
        })
    }

    /// Multiplies every weight (including the diagonal) by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let n = self.num_individuals();
        let data = self.weights.as_row_major().iter().map(|w| w * factor).collect();
        WindowEstimate {
            window_index: self.window_index,
            weights: WeightMatrix { n, data },
            stim_weights: self.stim_weights.iter().map(|w| w * factor).collect(),
            preferred_dirs: self.preferred_dirs.clone(),
        }
    }
}

/// Splits an autonomous vector `b` into magnitude `w_ii = |b|` and unit direction.
///
/// The direction is zero when `|b|` is below the coincidence threshold.
pub fn decompose_autonomous(b: Vec2) -> (f64, Vec2) {
    let n = b.norm();
    if n < EPS_COINCIDE {
        (n, Vec2::ZERO)
    } else {
        (n, Vec2::new(b.x / n, b.y / n))
    }
}

/// Sliding-window sequence of estimates, step 1.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EstimateSeries(Vec<WindowEstimate>);

impl EstimateSeries {
    pub fn new(windows: Vec<WindowEstimate>) -> Self {
        EstimateSeries(windows)
    }

    pub fn windows(&self) -> &[WindowEstimate] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, WindowEstimate> {
        self.0.iter()
    }

    /// Individual count, taken from the first window.
    pub fn num_individuals(&self) -> Option<usize> {
        self.0.first().map(WindowEstimate::num_individuals)
    }

    pub fn into_inner(self) -> Vec<WindowEstimate> {
        self.0
    }
}

impl From<Vec<WindowEstimate>> for EstimateSeries {
    fn from(v: Vec<WindowEstimate>) -> Self {
        EstimateSeries(v)
    }
}

impl<'a> IntoIterator for &'a EstimateSeries {
    type Item = &'a WindowEstimate;
    type IntoIter = std::slice::Iter<'a, WindowEstimate>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_examples() {
        assert_eq!(
            decompose_autonomous(Vec2::new(3.0, 4.0)),
            (5.0, Vec2::new(0.6, 0.8))
        );
        assert_eq!(decompose_autonomous(Vec2::ZERO), (0.0, Vec2::ZERO));
        assert_eq!(
            decompose_autonomous(Vec2::new(0.0, -2.0)),
            (2.0, Vec2::new(0.0, -1.0))
        );
    }

    fn sample() -> WindowEstimate {
        let weights = WeightMatrix::try_from(vec![
            vec![0.5, 0.1, 0.0],
            vec![0.2, 0.0, 0.3],
            vec![0.0, 0.4, 1.0],
        ])
        .unwrap();
        WindowEstimate {
            window_index: 4,
            weights,
            stim_weights: vec![0.1, 0.2, 0.3],
            preferred_dirs: vec![Vec2::new(1.0, 0.0), Vec2::ZERO, Vec2::new(0.0, -1.0)],
        }
    }

    #[test]
    fn validation() {
        assert!(sample().validate().is_ok());
        let mut bad = sample();
        bad.weights.set(0, 1, -0.1);
        assert!(bad.validate().is_err());
        let mut bad = sample();
        bad.preferred_dirs[1] = Vec2::new(1.0, 0.0);
        assert!(bad.validate().is_err());
        let mut bad = sample();
        bad.preferred_dirs[0] = Vec2::new(0.5, 0.0);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn permutation_moves_rows_and_columns() {
        let e = sample();
        let p = e.permuted(&[2, 0, 1]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(p.weights.get(a, b), e.weights.get([2, 0, 1][a], [2, 0, 1][b]));
            }
        }
        assert_eq!(p.stim_weights, vec![0.3, 0.1, 0.2]);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn matrix_json_is_nested_rows() {
        let m = WeightMatrix::from_row_major(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[1.0,2.0],[3.0,4.0]]");
        assert!(serde_json::from_str::<WeightMatrix>("[[1.0],[2.0,3.0]]").is_err());
    }
}
