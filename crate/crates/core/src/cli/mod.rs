//! Command-line front end.
//!
//! Each subcommand reads the shared TOML [`Config`], runs one workflow and
//! writes CSV files into the output directory together with a
//! `<command>.manifest.toml` run manifest. CSV files start with `#` lines
//! that repeat the manifest (minus wall-clock time), so identical inputs
//! give byte-identical CSV output.
//!
//! Exit codes: 0 success, 1 failed verification, 2 configuration or input
//! error, 3 eigensolver failure, 4 simulation blow-up.

mod commands;
pub mod config;
mod manifest;
pub mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::Config;
pub use manifest::RunManifest;

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "hybrid-turbulence", version, about = "Hybrid-norm turbulence and Schrödinger spectrum toolkit")]
pub struct Cli {
    /// TOML configuration file; defaults apply to every missing key.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override the master seed of the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for CSV output and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hybrid norm of a field.
    Norm,
    /// Lowest eigenvalues of -Δ + V with min-max margins.
    Spectrum,
    /// Anisotropic dissipation trajectory and decay rates.
    Dissipate,
    /// Stochastic Navier-Stokes ensemble.
    Simulate {
        /// Repeat the run at dt/2 and report the energy-residual order.
        #[arg(long)]
        dt_study: bool,
    },
    /// Run every acceptance check and print a summary table.
    Verify {
        /// Halve the grid sizes and use the looser reduced tolerances.
        #[arg(long)]
        reduced: bool,
        #[arg(long, hide = true)]
        inject_fault: Option<verify::Fault>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Spectrum => "spectrum",
            Command::Dissipate => "dissipate",
            Command::Simulate { .. } => "simulate",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Execute a parsed command line. Returns 0, or 1 for a failed verification.
pub fn run(cli: &Cli) -> Result<u8> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    std::fs::create_dir_all(&cli.out)?;
    let started = std::time::Instant::now();
    let mut manifest = RunManifest::new(cli.command.name(), &config);
    let code = match &cli.command {
        Command::Norm => commands::norm(&config, &cli.out, &mut manifest)?,
        Command::Spectrum => commands::spectrum(&config, &cli.out, &mut manifest)?,
        Command::Dissipate => commands::dissipate(&config, &cli.out, &mut manifest)?,
        Command::Simulate { dt_study } => commands::simulate(&config, *dt_study, &cli.out, &mut manifest)?,
        Command::Verify { reduced, inject_fault } => {
            let opts = verify::Options {
                reduced: *reduced,
                fault: *inject_fault,
            };
            commands::verify(&config, opts, &cli.out, &mut manifest)?
        }
    };
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    manifest.write(&cli.out)?;
    Ok(code)
}
