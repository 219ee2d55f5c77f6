//! Command-line front end for expansive block empirical likelihood.
//!
//! Subcommands: `quantiles`, `ci`, `coverage`, `power` and `select-block`.
//! Settings come from an optional TOML file (`--config`) overridden by
//! flags. Exit codes: 0 success, 2 configuration or input error, 3 numerical
//! failure.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::Params;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<ebel::Error> for CliError {
    fn from(e: ebel::Error) -> Self {
        use ebel::Error as E;
        match e {
            E::HullViolation | E::NonConvergence { .. } | E::ProfileNonConvergence(_) | E::DegenerateSample(_) => {
                CliError::Numerical(e.to_string())
            }
            E::DimensionMismatch { .. }
            | E::BlockLength { .. }
            | E::Domain(_)
            | E::NonCausal { .. }
            | E::InvalidWeight(_)
            | E::InvalidInput(_)
            | E::Calibration(_) => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ebel", version, about = "Expansive block empirical likelihood for time series")]
pub struct Cli {
    /// TOML file with settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate limit-law quantiles by simulation.
    Quantiles(Params),
    /// Confidence interval for the mean of a series.
    Ci(Params),
    /// Monte Carlo coverage of interval procedures.
    Coverage(Params),
    /// Monte Carlo power against local alternatives.
    Power(Params),
    /// Data-driven block length for a series.
    SelectBlock(Params),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Quantiles(_) => "quantiles",
            Command::Ci(_) => "ci",
            Command::Coverage(_) => "coverage",
            Command::Power(_) => "power",
            Command::SelectBlock(_) => "select-block",
        }
    }

    fn flags(&self) -> &Params {
        match self {
            Command::Quantiles(p) | Command::Ci(p) | Command::Coverage(p) | Command::Power(p) | Command::SelectBlock(p) => p,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Messages go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => Params::from_file(path)?,
        None => Params::default(),
    };
    let flags = cli.command.flags();
    flags.validate()?;
    let ctx = commands::Context {
        command: cli.command.name(),
        config_path: cli.config.clone(),
        file: file.clone(),
        flags: flags.clone(),
        params: file.overridden_by(flags),
    };
    if let Some(threads) = ctx.params.threads {
        if threads == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match cli.command {
        Command::Quantiles(_) => commands::quantiles(&ctx),
        Command::Ci(_) => commands::ci(&ctx),
        Command::Coverage(_) => commands::coverage(&ctx),
        Command::Power(_) => commands::power(&ctx),
        Command::SelectBlock(_) => commands::select_block_report(&ctx),
    }
}
