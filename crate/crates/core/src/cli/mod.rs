//! The `qtomo` command-line front end.
//!
//! Subcommands: `simulate`, `estimate`, `fisher`, `controls`, `bench`,
//! `catalog`. Exit codes: 0 success, 2 configuration error, 3 data error,
//! 4 numerical failure.

mod bench;
mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use bench::{rmse, BenchPlan};
pub use commands::{build_candidate_grid, estimate_records, grid_seed};
pub use config::{EstimationConfig, ExperimentConfig, OutputConfig, TruthSpec};

use crate::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::UnsupportedDimension(_)
        | Error::DimensionMismatch(_, _)
        | Error::InvalidState(_)
        | Error::UnknownSetting(_)
        | Error::UnknownCatalog(_)
        | Error::InvalidArgument(_)
        | Error::Json(_) => EXIT_CONFIG,
        Error::ConfigMismatch
        | Error::InconsistentData
        | Error::MissingObservable(_)
        | Error::Format(_)
        | Error::Io(_)
        | Error::Csv(_) => EXIT_DATA,
        Error::Underflow | Error::DegenerateInformation | Error::NonPauliCommutator(_, _) => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Parser)]
#[command(name = "qtomo", version, about = "Continuous weak-measurement quantum state tomography")]
pub struct Cli {
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate measurement records and write a CTOM1 file.
    Simulate(SimulateArgs),
    /// Reconstruct the initial state from a record file.
    Estimate(EstimateArgs),
    /// Fisher information matrix and Cramér–Rao floor.
    Fisher(FisherArgs),
    /// Commutator table and reachable components for a control setting.
    Controls(ControlsArgs),
    /// Parameter sweeps with repetitions, written as CSV.
    Bench(BenchArgs),
    /// Print the built-in test-state catalogs.
    Catalog(CatalogArgs),
}

/// Experiment parameters; each flag overrides the `--config` file.
#[derive(Debug, Default, Args)]
pub struct ExperimentArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Control setting code, e.g. XYZ, 0+XYZ, XY+YZ, "(0.3,1.2)".
    #[arg(long)]
    pub setting: Option<String>,
    /// Rabi rate in units of 2π/T.
    #[arg(long = "omega")]
    pub omega_2pi_per_t: Option<f64>,
    /// Coupling rate in units of 2π/T.
    #[arg(long = "coupling")]
    pub coupling_2pi_per_t: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Total measurement time T.
    #[arg(long)]
    pub total_time: Option<f64>,
    /// Characteristic measurement time τ.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of records N.
    #[arg(long)]
    pub n_records: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// True state: catalog:NAME:I, bloch:x,y,z, bell, mixed, hs-random or a JSON file.
    #[arg(long)]
    pub truth: Option<String>,
    /// Known ancilla (first qubit) state, same syntax as --truth.
    #[arg(long)]
    pub ancilla: Option<String>,
}

impl ExperimentArgs {
    pub fn resolve(&self) -> crate::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        set!(setting, omega_2pi_per_t, coupling_2pi_per_t, dt, total_time, tau, n_records, seed);
        if self.truth.is_some() {
            cfg.truth = self.truth.clone();
        }
        if self.ancilla.is_some() {
            cfg.ancilla = self.ancilla.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Output record file (overrides output.records).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the records as CSV, one record per row.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// CTOM1 record file.
    #[arg(long)]
    pub records: PathBuf,
    /// bme, mpbe, mle or li.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// hs-uniform-ball or product-with-fixed-ancilla.
    #[arg(long)]
    pub grid_kind: Option<String>,
    #[arg(long)]
    pub de_restarts: Option<usize>,
    /// Report JSON path (default: stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Per-coefficient CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Simpson intervals for the time integral.
    #[arg(long, default_value_t = crate::fisher::DEFAULT_INTERVALS)]
    pub intervals: usize,
    /// JSON output path (default: stdout).
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// CSV of per-label diagonals and floors.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ControlsArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    #[arg(long, default_value_t = crate::controls::DEFAULT_MAX_DEPTH)]
    pub max_depth: usize,
    /// Tabulate against every standard term instead of the setting's own terms.
    #[arg(long)]
    pub all_terms: bool,
    /// Emit JSON instead of aligned text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Sweep as NAME=v1,v2,… (repeatable; points are the Cartesian product).
    /// Names: omega, coupling, tau, total-time, dt, n-records, setting, truth.
    #[arg(long = "sweep")]
    pub sweeps: Vec<String>,
    /// Comma-separated methods to run on every repetition.
    #[arg(long, default_value = "bme")]
    pub methods: String,
    #[arg(long, default_value_t = 10)]
    pub repetitions: usize,
    /// Full-scale run: 100 repetitions unless --repetitions is larger.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub grid_kind: Option<String>,
    #[arg(long)]
    pub de_restarts: Option<usize>,
    /// Draw a fresh candidate grid per repetition.
    #[arg(long)]
    pub resample_grid: bool,
    /// Work budget in elementary operations; larger sweeps are refused.
    #[arg(long, default_value_t = 2e11)]
    pub budget: f64,
    /// Per-repetition CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-point summary CSV.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// single-qubit-9, remote-10 or two-qubit-9; omit to list names.
    pub name: Option<String>,
    /// Print only this entry as a state file.
    #[arg(long)]
    pub index: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> crate::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        // A pool may already exist when called repeatedly in-process; the
        // result does not depend on the thread count, so that is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Estimate(a) => commands::estimate(&a),
        Command::Fisher(a) => commands::fisher(&a),
        Command::Controls(a) => commands::controls(&a),
        Command::Bench(a) => bench::run(&a),
        Command::Catalog(a) => commands::catalog(&a),
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
