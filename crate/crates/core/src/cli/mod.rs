//! Command-line front end.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Status;
use config::Config;

#[derive(Debug, Parser)]
#[command(name = "piezo-blowup", version, about = "Blow-up simulation and certificates for damped piezoelectric beams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate and write the time series and a run report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output.dir` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate, then build and check the concavity certificate.
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bound on the blow-up time; with --simulate, compare it with a run.
    Lowerbound {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        simulate: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence studies over successive refinements.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every point of a parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, out: &Option<PathBuf>) -> crate::Result<(Config, PathBuf)> {
    let cfg = Config::from_file(path)?;
    let dir = out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    Ok((cfg, dir))
}

fn dispatch(cmd: &Command) -> crate::Result<Status> {
    match cmd {
        Command::Simulate { config, out } => {
            let (cfg, dir) = load(config, out)?;
            commands::run_simulate(&cfg, &dir)
        }
        Command::Certify { config, out } => {
            let (cfg, dir) = load(config, out)?;
            commands::run_certify(&cfg, &dir)
        }
        Command::Lowerbound { config, simulate, out } => {
            let (cfg, dir) = load(config, out)?;
            commands::run_lowerbound(&cfg, &dir, *simulate)
        }
        Command::Convergence { config, levels, out } => {
            let (cfg, dir) = load(config, out)?;
            commands::run_convergence(&cfg, &dir, *levels)
        }
        Command::Sweep { config, grid, out } => {
            let (cfg, dir) = load(config, out)?;
            commands::run_sweep(&cfg, &dir, grid)
        }
    }
}

/// Parses `args` and runs the selected command.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Usage.code() } else { 0 });
        }
    };
    match dispatch(&cli.command) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Status::Usage.code())
        }
    }
}
