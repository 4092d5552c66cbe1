//! Command-line experiment runner. Each experiment writes a CSV (or JSON
//! report) plus a `<experiment>.meta.json` sidecar into the output
//! directory.

pub mod config;
pub mod experiments;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::{Experiment, ExperimentConfig, Focal};
use crate::experiments::{Data, Outcome};
use crate::output::{json_bytes, output_path, write_atomic, ReferenceAntenna, Sidecar, SIDECAR_SCHEMA_VERSION};

#[derive(Debug, Parser)]
#[command(name = "elaa", version, about = "Near-field channel experiments for large planar arrays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML experiment configuration; every key is optional.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, env = "ELAA_THREADS")]
    pub threads: Option<usize>,
    /// Quadrature relative tolerance, overriding `quadrature.rel_tol`.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Total gain versus array diagonal under the four gain models.
    GainSweep,
    /// Received SNR versus N with transmit power scaled as P / N^ρ.
    ScalingLaw,
    /// Normalised array gain versus distance.
    ArrayGain,
    /// Beam gain versus distance for chosen focal points.
    Focus {
        /// Focal points: `inf`, metres, `d_B`, `d_FA` or `d_FA/k`.
        #[arg(long, value_delimiter = ',')]
        focal: Vec<Focal>,
    },
    /// Beam patterns of the focal ladder.
    Multiplex,
    /// Sum spectral efficiency of ZF and scheduling versus SNR.
    SumSe,
    /// Characteristic distances of the array as JSON.
    Distances,
    /// Print the normalised configuration, or every error in it.
    Validate,
}

impl Command {
    fn experiment(&self) -> Option<Experiment> {
        Some(match self {
            Command::GainSweep => Experiment::GainSweep,
            Command::ScalingLaw => Experiment::ScalingLaw,
            Command::ArrayGain => Experiment::ArrayGain,
            Command::Focus { .. } => Experiment::Focus,
            Command::Multiplex => Experiment::Multiplex,
            Command::SumSe => Experiment::SumSe,
            Command::Distances => Experiment::Distances,
            Command::Validate => return None,
        })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(#[from] elaa::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Report {
    /// Text for standard output.
    pub stdout: String,
    pub all_checks_passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.all_checks_passed {
            0
        } else {
            3
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads the config file (or defaults) and applies command-line overrides.
pub fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            ExperimentConfig::from_toml(&text)
                .map_err(|e| CliError::Config(vec![format!("{}: {}", path.display(), e.to_string().trim_end())]))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(e) = cli.command.experiment() {
        config.experiment = e;
    }
    if let Some(t) = cli.common.tolerance {
        config.quadrature.rel_tol = t;
    }
    if let Some(dir) = &cli.common.out {
        config.output.dir = dir.clone();
    }
    if let Command::Focus { focal } = &cli.command {
        if !focal.is_empty() {
            config.sweep.focal = Some(focal.clone());
        }
    }
    let config = config.normalized();
    let errors = config.validate();
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(CliError::Config(errors))
    }
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let config = load_config(cli)?;
    if matches!(cli.command, Command::Validate) {
        return Ok(Report {
            stdout: config.to_toml(),
            all_checks_passed: true,
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Threads(e.to_string()))?;
    let threads = pool.current_num_threads();
    let start = Instant::now();
    let outcome = pool.install(|| run_experiment(&config))?;
    let runtime_s = start.elapsed().as_secs_f64();
    write_outputs(&config, &outcome, threads, runtime_s)
}

pub fn run_experiment(config: &ExperimentConfig) -> elaa::Result<Outcome> {
    let q = &config.quadrature;
    match config.experiment {
        Experiment::GainSweep => experiments::gain_sweep(config, q),
        Experiment::ScalingLaw => experiments::scaling_law(config),
        Experiment::ArrayGain => experiments::array_gain(config, q),
        Experiment::Focus => experiments::focus(config, config.sweep.focal.as_deref().unwrap_or_default()),
        Experiment::Multiplex => experiments::multiplex(config),
        Experiment::SumSe => experiments::sum_se(config, q),
        Experiment::Distances => experiments::distances(config),
    }
}

fn write_outputs(config: &ExperimentConfig, outcome: &Outcome, threads: usize, runtime_s: f64) -> Result<Report, CliError> {
    let name = config.experiment.name();
    let dir = &config.output.dir;
    let (data_path, bytes) = match &outcome.data {
        Data::Csv(t) => (output_path(dir, name, ".csv"), t.to_csv()),
        Data::Json(v) => (output_path(dir, name, ".json"), json_bytes(v)),
    };
    write_atomic(&data_path, &bytes).map_err(io_err(&data_path))?;

    let spec = experiments::spec(config)?;
    let regions = elaa::regions::RegionReport::new(&spec);
    let all_checks_passed = outcome.checks.iter().all(|c| c.passed);
    let sidecar = Sidecar {
        schema_version: SIDECAR_SCHEMA_VERSION,
        experiment: name.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        config,
        outputs: vec![file_name(&data_path)],
        threads,
        runtime_s,
        reference_antenna: ReferenceAntenna {
            side_m: spec.antenna_side(),
            area_m2: spec.antenna_area(),
            diagonal_m: regions.d,
            fraunhofer_distance_m: regions.d_f,
            wavelength_m: spec.wavelength(),
        },
        checks: &outcome.checks,
        all_checks_passed,
        residuals: &outcome.residuals,
    };
    let meta_path = output_path(dir, name, ".meta.json");
    write_atomic(&meta_path, &json_bytes(&sidecar)).map_err(io_err(&meta_path))?;

    let mut stdout = format!("{name}: wrote {} and {}\n", data_path.display(), meta_path.display());
    for c in &outcome.checks {
        let tag = if c.passed { "ok" } else { "FAILED" };
        stdout.push_str(&format!("  [{tag}] {}: {}\n", c.name, c.detail));
    }
    Ok(Report {
        stdout,
        all_checks_passed,
    })
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}
