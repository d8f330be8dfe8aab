use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use schoolnet::simulator::{builtin_scenario, BUILTIN_NAMES};
use schoolnet::{EstimatorConfig, StimulusField};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

const SIMULATE_PREFIX: &str = "simulate:";

/// Output files a run can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Estimates,
    Indices,
    Entropy,
    Networks,
}

impl Emit {
    pub const ALL: [Emit; 4] = [Emit::Estimates, Emit::Indices, Emit::Entropy, Emit::Networks];

    pub fn file_name(self) -> &'static str {
        match self {
            Emit::Estimates => "estimates.jsonl",
            Emit::Indices => "indices.csv",
            Emit::Entropy => "entropy.json",
            Emit::Networks => "networks.csv",
        }
    }
}

impl FromStr for Emit {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "estimates" => Ok(Emit::Estimates),
            "indices" => Ok(Emit::Indices),
            "entropy" => Ok(Emit::Entropy),
            "networks" => Ok(Emit::Networks),
            other => Err(CliError::Config(format!(
                "unknown emit target {other:?}; expected estimates, indices, entropy or networks"
            ))),
        }
    }
}

impl fmt::Display for Emit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Emit::Estimates => "estimates",
            Emit::Indices => "indices",
            Emit::Entropy => "entropy",
            Emit::Networks => "networks",
        };
        f.write_str(s)
    }
}

/// Where trajectories come from.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSource {
    Scenario(String),
    Csv(PathBuf),
}

impl InputSource {
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(CliError::Config("input is required".into()));
        }
        match s.strip_prefix(SIMULATE_PREFIX) {
            Some(name) if builtin_scenario(name).is_some() => Ok(InputSource::Scenario(name.to_owned())),
            Some(name) => Err(CliError::Config(format!(
                "unknown scenario {name:?}; built-ins are {}",
                BUILTIN_NAMES.join(", ")
            ))),
            None => Ok(InputSource::Csv(PathBuf::from(s))),
        }
    }
}

fn default_emit() -> BTreeSet<Emit> {
    Emit::ALL.into_iter().collect()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A complete run, as read from `--config` JSON and overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// A trajectories CSV path or `simulate:<scenario>`.
    pub input: String,
    pub estimator: EstimatorConfig,
    /// Stimulus field; a simulated scene brings its own when this is unset.
    pub stimulus: Option<StimulusField>,
    pub output_dir: PathBuf,
    pub emit: BTreeSet<Emit>,
    pub flip_y: bool,
    /// Overrides the scene's noise seed for simulated input.
    pub seed: Option<u64>,
    /// Edges below this weight are left out of networks.csv.
    pub network_threshold: f64,
    /// Longest run of missing frames per id that ingestion interpolates.
    pub max_gap: usize,
    /// Frames per second of CSV input.
    pub frame_rate: f64,
    /// Length unit tag of CSV input.
    pub length_unit: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: String::new(),
            estimator: EstimatorConfig::default(),
            stimulus: None,
            output_dir: default_output_dir(),
            emit: default_emit(),
            flip_y: false,
            seed: None,
            network_threshold: 0.0,
            max_gap: 5,
            frame_rate: 60.0,
            length_unit: "cm".to_owned(),
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn source(&self) -> Result<InputSource> {
        InputSource::parse(&self.input)
    }

    pub fn validate(&self) -> Result<()> {
        self.source()?;
        if self.emit.is_empty() {
            return Err(CliError::Config("emit must name at least one output".into()));
        }
        self.estimator.validate()?;
        if let Some(field) = &self.stimulus {
            field.validate()?;
        }
        if !(self.network_threshold >= 0.0 && self.network_threshold.is_finite()) {
            return Err(CliError::Config(format!(
                "network_threshold must be a non-negative number, got {}",
                self.network_threshold
            )));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return Err(CliError::Config(format!(
                "frame_rate must be positive, got {}",
                self.frame_rate
            )));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(CliError::Config("output_dir must not be empty".into()));
        }
        if self.output_dir.is_file() {
            return Err(CliError::Config(format!(
                "output_dir {} is a file",
                self.output_dir.display()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use schoolnet::{Penalty, Sense, Vec2};

    #[test]
    fn full_schema_parses() {
        let json = r#"{
            "input": "simulate:leader",
            "estimator": {"lag_frames": 2, "window_len": 40, "lambda": {"relative_to_max": 0.1},
                          "solver_tol": 1e-9, "max_iters": 500, "velocity_scheme": "central"},
            "stimulus": {"variant": "rotating", "center": [20, 20],
                         "angular_speed_deg_per_frame": 0.572, "sense": "clockwise"},
            "output_dir": "results",
            "emit": ["indices", "entropy"],
            "flip_y": true,
            "seed": 7
        }"#;
        let cfg: RunConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.source().unwrap(), InputSource::Scenario("leader".into()));
        assert_eq!(cfg.estimator.window_len, 40);
        assert_eq!(cfg.estimator.lambda, Penalty::Relative { relative_to_max: 0.1 });
        assert_eq!(
            cfg.stimulus,
            Some(StimulusField::Rotating {
                center: Vec2::new(20.0, 20.0),
                angular_speed_deg_per_frame: 0.572,
                sense: Sense::Clockwise,
            })
        );
        assert_eq!(cfg.emit, [Emit::Indices, Emit::Entropy].into_iter().collect());
        assert!(cfg.flip_y);
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.max_gap, 5);
        cfg.validate().unwrap();
    }

    #[test]
    fn defaults_and_rejections() {
        let cfg: RunConfig = serde_json::from_str(r#"{"input": "tracks.csv"}"#).unwrap();
        assert_eq!(cfg.emit.len(), 4);
        assert_eq!(cfg.source().unwrap(), InputSource::Csv("tracks.csv".into()));
        cfg.validate().unwrap();

        let empty: RunConfig = serde_json::from_str(r#"{"input": "a.csv", "emit": []}"#).unwrap();
        assert!(matches!(empty.validate(), Err(CliError::Config(_))));
        assert!(serde_json::from_str::<RunConfig>(r#"{"inptu": "a.csv"}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"emit": ["plots"]}"#).is_err());
        assert!(RunConfig::default().validate().is_err());
        assert!(InputSource::parse("simulate:nope").is_err());
    }
}
