//! The pipelines behind each subcommand.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use schoolnet::simulator::builtin_scenario;
use schoolnet::{estimate_series, simulate, EstimateSeries, ScenarioSpec, StimulusField, TrajectoryDataset};

use crate::config::{Emit, InputSource, RunConfig};
use crate::emit::{parse_estimates, render_estimates, render_outputs, write_atomically};
use crate::error::{CliError, Result};
use crate::ingest::{ingest_csv, render_trajectories_csv, IngestOptions};

/// Trajectories plus the field they were recorded under.
pub struct LoadedInput {
    pub dataset: TrajectoryDataset,
    pub field: StimulusField,
    /// Planted parameters, for simulated input.
    pub truth: Option<EstimateSeries>,
}

pub fn scenario(name: &str, seed: Option<u64>) -> Result<ScenarioSpec> {
    let mut spec = builtin_scenario(name)
        .ok_or_else(|| CliError::Config(format!("unknown scenario {name:?}")))?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    Ok(spec)
}

pub fn load_input(cfg: &RunConfig) -> Result<LoadedInput> {
    match cfg.source()? {
        InputSource::Scenario(name) => {
            let spec = scenario(&name, cfg.seed)?;
            let (dataset, truth) = simulate(&spec)?;
            Ok(LoadedInput {
                dataset,
                field: cfg.stimulus.unwrap_or(spec.stimulus),
                truth: Some(truth),
            })
        }
        InputSource::Csv(path) => {
            let opts = IngestOptions {
                flip_y: cfg.flip_y,
                max_gap: cfg.max_gap,
                frame_rate: cfg.frame_rate,
                length_unit: cfg.length_unit.clone(),
            };
            let dataset = ingest_csv(&path, &opts)?;
            let field = cfg.stimulus.unwrap_or_else(|| {
                log::warn!("no stimulus given for {}; the stimulus column is zero", path.display());
                StimulusField::None
            });
            Ok(LoadedInput {
                dataset,
                field,
                truth: None,
            })
        }
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub individuals: usize,
    pub frames: usize,
    pub windows: usize,
    pub written: Vec<PathBuf>,
}

/// Ingest or simulate, estimate, compute indices, write the selected files.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let input = load_input(cfg)?;
    let series = estimate_series(&input.dataset, &input.field, &cfg.estimator)?;
    let files = render_outputs(&series, &cfg.emit, cfg.network_threshold);
    let written = write_atomically(&cfg.output_dir, &files)?;
    Ok(RunSummary {
        individuals: input.dataset.num_individuals(),
        frames: input.dataset.num_frames(),
        windows: series.len(),
        written,
    })
}

/// Options of the `simulate` subcommand.
#[derive(Clone, Debug)]
pub struct SimulateOptions {
    pub scenario: String,
    pub seed: Option<u64>,
    pub noise_sigma: Option<f64>,
    pub frames: Option<usize>,
    pub output_dir: PathBuf,
}

/// Writes trajectories.csv, truth.jsonl (planted parameters per window, in
/// estimates.jsonl form) and scenario.json.
pub fn simulate_to_dir(opts: &SimulateOptions) -> Result<Vec<PathBuf>> {
    let mut spec = scenario(&opts.scenario, opts.seed)?;
    if let Some(sigma) = opts.noise_sigma {
        spec.noise_sigma = sigma;
    }
    if let Some(frames) = opts.frames {
        spec.num_frames = frames;
        // Truncate the schedule to the new length.
        spec.schedule.retain(|r| r.start < frames);
        if let Some(last) = spec.schedule.last_mut() {
            last.end = frames;
        }
    }
    let (dataset, truth) = simulate(&spec)?;
    let mut scene = serde_json::to_string_pretty(&spec).expect("plain data serializes");
    scene.push('\n');
    let files = vec![
        ("trajectories.csv", render_trajectories_csv(&dataset)),
        ("truth.jsonl", render_estimates(&truth)),
        ("scenario.json", scene),
    ];
    write_atomically(&opts.output_dir, &files)
}

/// Recomputes index files from an existing estimates.jsonl.
pub fn indices_from_estimates(
    estimates: &Path,
    output_dir: &Path,
    emit: &BTreeSet<Emit>,
    network_threshold: f64,
) -> Result<Vec<PathBuf>> {
    if emit.is_empty() {
        return Err(CliError::Config("emit must name at least one output".into()));
    }
    let text = std::fs::read_to_string(estimates).map_err(|e| CliError::io(estimates, e))?;
    let series = parse_estimates(&text, estimates)?;
    let files = render_outputs(&series, emit, network_threshold);
    write_atomically(output_dir, &files)
}
