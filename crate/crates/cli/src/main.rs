//! `beamtrack` — run the beam-tracking experiment from the shell.
//!
//! Three subcommands:
//!
//! - `run`: execute the Monte Carlo experiment in both control modes, write
//!   per-episode trace CSVs plus the aggregate comparison (CSV and/or JSON),
//!   and print a summary table.
//! - `root`: print the beamwidth constant (first positive root of
//!   `tan x = 2x`) and its residual, for checking the solver from the shell.
//! - `beamwidth`: one-shot calculator mapping a steering estimate and its
//!   error spread to an active element count.
//!
//! Exit codes: 0 success, 2 configuration error (bad keys, values, or
//! arguments), 3 I/O error.

mod config;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use beamtrack_core::{
    aggregate, run_episodes, select_beamwidth, solve_root, Mode, SimConfig, SteeringAngle,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Draft;
use report::RunReport;

#[derive(Parser)]
#[command(
    name = "beamtrack",
    version,
    about = "Particle-filter beam tracking with adaptive element-count control"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment in both modes and write traces plus the aggregate
    Run(RunArgs),
    /// Print the beamwidth constant and the residual of its equation
    Root,
    /// Pick the active element count for one estimate/spread pair
    Beamwidth {
        /// Steering estimate in degrees, strictly between 0 and 180
        phi_hat_deg: f64,
        /// Posterior angle spread in degrees, non-negative
        e_deg: f64,
        /// Hardware element budget, at least 1
        m0: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Config file of key=value lines ('#' starts a comment)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory, created if missing
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Override one config key, e.g. --set runs=10 (repeatable, wins over
    /// the file)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Aggregate output format (repeatable; traces are always CSV)
    #[arg(long, value_enum, value_name = "FMT", default_value = "csv")]
    format: Vec<Format>,

    /// Master seed, winning over both the file and --set seed=...
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// A fully resolved `run` invocation: what to simulate, where to put it, and
/// in which aggregate formats. Always carries at least one format.
struct RunManifest {
    cfg: SimConfig,
    out_dir: PathBuf,
    csv: bool,
    json: bool,
}

impl RunManifest {
    fn resolve(args: &RunArgs) -> Result<Self, AppError> {
        let mut draft = Draft::default();
        if let Some(path) = &args.config {
            let text = fs::read_to_string(path)
                .map_err(|e| AppError::Io(format!("reading {}: {e}", path.display())))?;
            draft
                .apply_text(&text)
                .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
        }
        for pair in &args.set {
            draft.apply_override(pair).map_err(AppError::Config)?;
        }
        if let Some(seed) = args.seed {
            draft.set_seed(seed);
        }
        let cfg = draft.build().map_err(AppError::Config)?;
        let csv = args.format.contains(&Format::Csv);
        let json = args.format.contains(&Format::Json);
        if !csv && !json {
            return Err(AppError::Config("no aggregate format selected".into()));
        }
        Ok(Self {
            cfg,
            out_dir: args.out.clone(),
            csv,
            json,
        })
    }
}

enum AppError {
    Config(String),
    Io(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Root => cmd_root(),
        Command::Beamwidth {
            phi_hat_deg,
            e_deg,
            m0,
        } => cmd_beamwidth(phi_hat_deg, e_deg, m0),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(3)
        }
    }
}

/// Executes the experiment in both control modes (whatever `mode` the config
/// names — it matters to library users, not here) and writes every artifact.
fn cmd_run(args: &RunArgs) -> Result<(), AppError> {
    let manifest = RunManifest::resolve(args)?;

    let adaptive_cfg = manifest.cfg.with_mode(Mode::Adaptive);
    let fixed_cfg = manifest.cfg.with_mode(Mode::Fixed);
    let adaptive_traces = run_episodes(&adaptive_cfg).map_err(sim_error)?;
    let fixed_traces = run_episodes(&fixed_cfg).map_err(sim_error)?;
    let adaptive = aggregate(&adaptive_traces).map_err(sim_error)?;
    let fixed = aggregate(&fixed_traces).map_err(sim_error)?;

    let report = RunReport {
        cfg: &manifest.cfg,
        adaptive_traces: &adaptive_traces,
        fixed_traces: &fixed_traces,
        adaptive: &adaptive,
        fixed: &fixed,
    };
    let written = report
        .write(&manifest.out_dir, manifest.csv, manifest.json)
        .map_err(|e| AppError::Io(format!("writing to {}: {e}", manifest.out_dir.display())))?;

    print!("{}", report.summary());
    println!(
        "wrote {} files to {}",
        written.len(),
        manifest.out_dir.display()
    );
    Ok(())
}

/// Prints the beamwidth constant to 9 decimal places along with how well it
/// satisfies its defining equation.
fn cmd_root() -> Result<(), AppError> {
    let root = solve_root().map_err(sim_error)?;
    println!("x_star = {:.9}", root.value());
    println!("tan(x) - 2x = {:e}", root.residual());
    Ok(())
}

/// One-shot element-count calculation, printed as two `key = value` lines.
fn cmd_beamwidth(phi_hat_deg: f64, e_deg: f64, m0: usize) -> Result<(), AppError> {
    if !(phi_hat_deg > 0.0 && phi_hat_deg < 180.0) {
        return Err(AppError::Config(format!(
            "phi_hat_deg: expected an angle strictly between 0 and 180, got {phi_hat_deg}"
        )));
    }
    let phi_hat = SteeringAngle::from_degrees(phi_hat_deg).map_err(sim_error)?;
    let decision = select_beamwidth(phi_hat, e_deg.to_radians(), m0).map_err(sim_error)?;
    println!("m_k = {}", decision.m_k);
    println!("clamped = {}", decision.clamped);
    Ok(())
}

/// Library errors surface as exit code 2: by this point every path into the
/// simulator is parameter-driven, so a failure means an unusable setup.
fn sim_error(e: beamtrack_core::Error) -> AppError {
    AppError::Config(e.to_string())
}
