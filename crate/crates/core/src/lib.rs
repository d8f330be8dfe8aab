//! Estimation of time-varying interaction networks in small swarms driven by
//! an external directional stimulus.
//!
//! Each individual's velocity is modeled as a non-negative combination of unit
//! directions toward its neighbors (attraction), the local stimulus direction,
//! and a free autonomous vector. [`estimator`] fits that model per sliding
//! window with a non-negative lasso, [`indices`] turns the fitted weights into
//! group- and individual-level schooling indices, and [`simulator`] generates
//! ground-truth scenes from the same model.

pub mod error;
pub mod estimate;
pub mod estimator;
pub mod geometry;
pub mod indices;
pub mod metrics;
pub mod simulator;
pub mod trajectory;

pub use error::{Error, Result};
pub use estimate::{decompose_autonomous, EstimateSeries, WeightMatrix, WindowEstimate};
pub use estimator::{estimate_series, EstimatorConfig, Penalty};
pub use geometry::{unit_direction, Sense, StimulusField, Vec2, EPS_COINCIDE};
pub use indices::{EntropyReport, WindowIndices};
pub use simulator::{simulate, ScenarioSpec};
pub use trajectory::{TrajectoryDataset, VelocityScheme};
