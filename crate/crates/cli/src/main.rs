use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use schoolnet::{Penalty, Sense, StimulusField, Vec2, VelocityScheme};
use schoolnet_cli::config::{Emit, InputSource, RunConfig};
use schoolnet_cli::error::{CliError, Result};
use schoolnet_cli::ingest::{ingest_csv, IngestOptions};
use schoolnet_cli::run::{indices_from_estimates, run, simulate_to_dir, SimulateOptions};

/// Time-varying interaction networks of small groups moving under a rotating stimulus.
///
/// Set SWARM_THREADS to cap estimation threads (0 or unset = all cores) and
/// RUST_LOG for log verbosity (default warn).
#[derive(Parser)]
#[command(name = "schoolnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a built-in scene: trajectories.csv, truth.jsonl, scenario.json.
    Simulate(SimulateArgs),
    /// Ingest or simulate, fit every sliding window, write the selected outputs.
    #[command(visible_alias = "run")]
    Estimate(RunArgs),
    /// Recompute indices, entropy and networks from an estimates.jsonl.
    Indices(IndicesArgs),
    /// Check a config (and ingest its CSV input) without writing anything.
    Validate(RunArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scene name: stim-follow, free-school, decouple, leader, hetero-stim, homo-stim.
    #[arg(long, required_unless_present = "list")]
    scenario: Option<String>,
    /// Print the built-in scene names and exit.
    #[arg(long)]
    list: bool,
    /// Noise seed [default: the scene's own].
    #[arg(long)]
    seed: Option<u64>,
    /// Noise standard deviation per component, length units per frame [default: the scene's own].
    #[arg(long)]
    noise_sigma: Option<f64>,
    /// Number of frames [default: the scene's own].
    #[arg(long)]
    frames: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
}

/// Every config key as a flag; flags override `--config`.
#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags given alongside it override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `input`: trajectories CSV (header frame,id,x,y) or simulate:<scene> [default: none, required].
    #[arg(long)]
    input: Option<String>,
    /// `output_dir`: where output files go [default: out].
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// `emit`: comma-separated subset of estimates,indices,entropy,networks [default: all four].
    #[arg(long, value_delimiter = ',')]
    emit: Option<Vec<String>>,
    /// `flip_y`: mirror y within its range, for image coordinates (y down) [default: false].
    #[arg(long)]
    flip_y: bool,
    /// `seed`: noise seed for simulate:<scene> input [default: the scene's own].
    #[arg(long)]
    seed: Option<u64>,
    /// `network_threshold`: smallest weight kept in networks.csv [default: 0].
    #[arg(long, alias = "network-threshold")]
    threshold: Option<f64>,
    /// `max_gap`: longest run of missing frames interpolated per id [default: 5].
    #[arg(long)]
    max_gap: Option<usize>,
    /// `frame_rate`: frames per second of CSV input [default: 60].
    #[arg(long)]
    frame_rate: Option<f64>,
    /// `length_unit`: unit tag of CSV coordinates [default: cm].
    #[arg(long)]
    length_unit: Option<String>,
    /// `stimulus`: none, or rotating:CX,CY,DEG_PER_FRAME,clockwise|counterclockwise
    /// [default: the scene's field for simulated input, none for CSV].
    #[arg(long)]
    stimulus: Option<String>,
    /// `estimator.lag_frames`: response lag in frames [default: 3].
    #[arg(long)]
    lag_frames: Option<usize>,
    /// `estimator.window_len`: frames per sliding window [default: 30].
    #[arg(long)]
    window_len: Option<usize>,
    /// `estimator.lambda`: fixed sparsity penalty [default: relative, see --lambda-relative].
    #[arg(long, conflicts_with = "lambda_relative")]
    lambda: Option<f64>,
    /// `estimator.lambda`: penalty as a fraction of each window's lambda_max [default: 0.05].
    #[arg(long)]
    lambda_relative: Option<f64>,
    /// `estimator.solver_tol`: coordinate-change convergence tolerance [default: 1e-10].
    #[arg(long)]
    solver_tol: Option<f64>,
    /// `estimator.max_iters`: coordinate-descent sweep limit [default: 100000].
    #[arg(long)]
    max_iters: Option<usize>,
    /// `estimator.velocity_scheme`: forward or central [default: forward].
    #[arg(long)]
    velocity_scheme: Option<String>,
}

#[derive(Args)]
struct IndicesArgs {
    /// estimates.jsonl written by `estimate`.
    #[arg(long)]
    estimates: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
    /// Comma-separated subset of indices,entropy,networks.
    #[arg(long, value_delimiter = ',', default_value = "indices,entropy,networks")]
    emit: Vec<String>,
    /// Smallest weight kept in networks.csv.
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
}

fn parse_emit(items: &[String]) -> Result<BTreeSet<Emit>> {
    items.iter().filter(|s| !s.trim().is_empty()).map(|s| s.parse()).collect()
}

fn parse_stimulus(s: &str) -> Result<Option<StimulusField>> {
    let bad = || {
        CliError::Config(format!(
            "stimulus {s:?}: expected none or rotating:CX,CY,DEG_PER_FRAME,clockwise|counterclockwise"
        ))
    };
    if s == "none" {
        return Ok(Some(StimulusField::None));
    }
    let rest = s.strip_prefix("rotating:").ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    let [cx, cy, speed, sense] = parts.as_slice() else {
        return Err(bad());
    };
    let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
    let sense = match *sense {
        "clockwise" => Sense::Clockwise,
        "counterclockwise" => Sense::Counterclockwise,
        _ => return Err(bad()),
    };
    Ok(Some(StimulusField::Rotating {
        center: Vec2::new(num(cx)?, num(cy)?),
        angular_speed_deg_per_frame: num(speed)?,
        sense,
    }))
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.input {
            cfg.input = v;
        }
        if let Some(v) = self.output_dir {
            cfg.output_dir = v;
        }
        if let Some(v) = self.emit {
            cfg.emit = parse_emit(&v)?;
        }
        cfg.flip_y |= self.flip_y;
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if let Some(v) = self.threshold {
            cfg.network_threshold = v;
        }
        if let Some(v) = self.max_gap {
            cfg.max_gap = v;
        }
        if let Some(v) = self.frame_rate {
            cfg.frame_rate = v;
        }
        if let Some(v) = self.length_unit {
            cfg.length_unit = v;
        }
        if let Some(v) = self.stimulus {
            cfg.stimulus = parse_stimulus(&v)?;
        }
        let est = &mut cfg.estimator;
        if let Some(v) = self.lag_frames {
            est.lag_frames = v;
        }
        if let Some(v) = self.window_len {
            est.window_len = v;
        }
        if let Some(v) = self.lambda {
            est.lambda = Penalty::Fixed(v);
        }
        if let Some(v) = self.lambda_relative {
            est.lambda = Penalty::Relative { relative_to_max: v };
        }
        if let Some(v) = self.solver_tol {
            est.solver_tol = v;
        }
        if let Some(v) = self.max_iters {
            est.max_iters = v;
        }
        if let Some(v) = self.velocity_scheme {
            est.velocity_scheme = match v.as_str() {
                "forward" => VelocityScheme::Forward,
                "central" => VelocityScheme::Central,
                other => {
                    return Err(CliError::Config(format!(
                        "velocity_scheme {other:?}: expected forward or central"
                    )))
                }
            };
        }
        Ok(cfg)
    }
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SWARM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("SWARM_THREADS={raw:?} is not a thread count")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::Simulate(args) => {
            if args.list {
                for name in schoolnet::simulator::BUILTIN_NAMES {
                    println!("{name}");
                }
                return Ok(());
            }
            let opts = SimulateOptions {
                scenario: args.scenario.expect("clap enforces --scenario"),
                seed: args.seed,
                noise_sigma: args.noise_sigma,
                frames: args.frames,
                output_dir: args.output_dir,
            };
            for path in simulate_to_dir(&opts)? {
                println!("{}", path.display());
            }
        }
        Command::Estimate(args) => {
            let summary = run(&args.into_config()?)?;
            log::info!(
                "{} individuals, {} frames, {} windows",
                summary.individuals,
                summary.frames,
                summary.windows
            );
            for path in summary.written {
                println!("{}", path.display());
            }
        }
        Command::Indices(args) => {
            let emit = parse_emit(&args.emit)?;
            if emit.contains(&Emit::Estimates) {
                return Err(CliError::Config("indices cannot emit estimates".into()));
            }
            if !(args.threshold >= 0.0) {
                return Err(CliError::Config("threshold must be non-negative".into()));
            }
            for path in indices_from_estimates(&args.estimates, &args.output_dir, &emit, args.threshold)? {
                println!("{}", path.display());
            }
        }
        Command::Validate(args) => {
            let cfg = args.into_config()?;
            cfg.validate()?;
            if let InputSource::Csv(path) = cfg.source()? {
                let opts = IngestOptions {
                    flip_y: cfg.flip_y,
                    max_gap: cfg.max_gap,
                    frame_rate: cfg.frame_rate,
                    length_unit: cfg.length_unit.clone(),
                };
                let ds = ingest_csv(&path, &opts)?;
                let windows = cfg.estimator.num_windows(ds.num_frames());
                println!(
                    "ok: {} individuals, {} frames, {windows} windows",
                    ds.num_individuals(),
                    ds.num_frames()
                );
            } else {
                println!("ok");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
