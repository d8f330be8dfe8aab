//! Tracked positions of a fixed group of individuals.

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::{Error, Result};

/// Finite-difference rule used to turn positions into velocities.
///
/// Velocities are in length units per frame; the frame period is not divided out.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VelocityScheme {
    /// `p[t+1] - p[t]`
    #[default]
    Forward,
    /// `(p[t+1] - p[t-1]) / 2`
    Central,
}

/// Dense positions `[frame][individual]` with frame and unit metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryDataset {
    num_individuals: usize,
    num_frames: usize,
    positions: Vec<Vec2>,
    frame_period: f64,
    length_unit: String,
}

impl TrajectoryDataset {
    /// Builds a dataset from per-frame rows, each holding one position per individual.
    pub fn new(
        frames: Vec<Vec<Vec2>>,
        frame_period: f64,
        length_unit: impl Into<String>,
    ) -> Result<Self> {
        let num_frames = frames.len();
        if num_frames < 2 {
            return Err(Error::input(format!(
                "a dataset needs at least 2 frames, got {num_frames}"
            )));
        }
        let num_individuals = frames[0].len();
        if num_individuals < 2 {
            return Err(Error::input(format!(
                "a dataset needs at least 2 individuals, got {num_individuals}"
            )));
        }
        if !(frame_period > 0.0 && frame_period.is_finite()) {
            return Err(Error::input(format!(
                "frame period must be positive, got {frame_period}"
            )));
        }
        let mut positions = Vec::with_capacity(num_frames * num_individuals);
        for (t, row) in frames.into_iter().enumerate() {
            if row.len() != num_individuals {
                return Err(Error::input(format!(
                    "frame {t} has {} positions, expected {num_individuals}",
                    row.len()
                )));
            }
            if let Some(i) = row.iter().position(|p| !p.is_finite()) {
                return Err(Error::input(format!(
                    "non-finite position for individual {} at frame {t}",
                    i + 1
                )));
            }
            positions.extend(row);
        }
        Ok(TrajectoryDataset {
            num_individuals,
            num_frames,
            positions,
            frame_period,
            length_unit: length_unit.into(),
        })
    }

    pub fn num_individuals(&self) -> usize {
        self.num_individuals
    }

    pub fn num_frames(&self) -> usize {
        self.num_frames
    }

    /// Seconds between consecutive frames.
    pub fn frame_period(&self) -> f64 {
        self.frame_period
    }

    pub fn length_unit(&self) -> &str {
        &self.length_unit
    }

    /// All positions at frame `t`, indexed by individual.
    pub fn frame(&self, t: usize) -> &[Vec2] {
        let n = self.num_individuals;
        &self.positions[t * n..(t + 1) * n]
    }

    pub fn position(&self, t: usize, i: usize) -> Vec2 {
        self.positions[t * self.num_individuals + i]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[Vec2]> {
        self.positions.chunks_exact(self.num_individuals)
    }

    /// Velocity of individual `i` at frame `t`.
    pub fn velocity(&self, i: usize, t: usize, scheme: VelocityScheme) -> Result<Vec2> {
        if i >= self.num_individuals {
            return Err(Error::range(format!(
                "individual index {i} with {} individuals",
                self.num_individuals
            )));
        }
        let last = self.num_frames - 1;
        match scheme {
            VelocityScheme::Forward if t < last => {
                Ok(self.position(t + 1, i) - self.position(t, i))
            }
            VelocityScheme::Central if t > 0 && t < last => {
                Ok((self.position(t + 1, i) - self.position(t - 1, i)) * 0.5)
            }
            _ => Err(Error::range(format!(
                "frame {t} has no {scheme:?} velocity in a dataset of {} frames",
                self.num_frames
            ))),
        }
    }

    /// Relabels individuals: new individual `a` is old individual `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.num_individuals)?;
        let frames = self
            .frames()
            .map(|row| perm.iter().map(|&old| row[old]).collect())
            .collect();
        TrajectoryDataset::new(frames, self.frame_period, self.length_unit.clone())
    }

    /// Rotates every position about the origin by `angle` radians.
    pub fn rotated(&self, angle: f64) -> Self {
        TrajectoryDataset {
            positions: self.positions.iter().map(|p| p.rotated(angle)).collect(),
            ..self.clone()
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::input(format!(
            "permutation of length {} for {n} individuals",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::input(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}
