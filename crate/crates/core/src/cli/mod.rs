//! The `mhdcrit` command line: `run`, `verify`, `sweep` and `diag`.
//!
//! Exit statuses: 0 success, 1 solver failure or failed verification,
//! 2 sweep finished with row errors, 3 `diag` found a ledger mismatch,
//! 64 usage, config or validation error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub mod checkpoint;
mod commands;
pub mod config;

pub use commands::{cmd_diag, cmd_run, cmd_sweep, cmd_verify, DiagSummary, RunSummary};
pub use config::{load_run_config, load_sweep_config, InitialSpec, RunConfig, SweepFileConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_SOLVER: u8 = 1;
pub const EXIT_ROW_ERRORS: u8 = 2;
pub const EXIT_DIAG_MISMATCH: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0} sweep rows failed")]
    RowErrors(usize),
    #[error("ledger mismatch: {0}")]
    DiagMismatch(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_USAGE,
            CliError::Solver(_) | CliError::Verification(_) | CliError::Io(_) => EXIT_SOLVER,
            CliError::RowErrors(_) => EXIT_ROW_ERRORS,
            CliError::DiagMismatch(_) => EXIT_DIAG_MISMATCH,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mhdcrit", version, about = "Density-dependent incompressible MHD solver and diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Advance one trajectory, writing its ledger and checkpoints.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from a checkpoint (`.snap` or its `.json` sidecar).
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Override the ledger sampling stride.
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Run the exact-solution verification suite.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify runs over an amplitude ladder.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Recompute ledger records from a run directory's checkpoints.
    Diag {
        /// Run directory (holding `ledger.ndjson` and `checkpoints/`).
        dir: PathBuf,
    },
}

/// Cap the data-parallel width from `MHDCRIT_THREADS`.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("MHDCRIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("MHDCRIT_THREADS must be a positive integer, got {v:?}")))?;
    #[cfg(feature = "parallel")]
    {
        // a second call in the same process (tests) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Run { config, out, resume, stride } => {
            let mut cfg = load_run_config(&config)?;
            if let Some(k) = stride {
                if k == 0 {
                    return Err(CliError::Config("--stride must be >= 1".into()));
                }
                cfg.stride = k;
            }
            let out = out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("mhdcrit-run"));
            let summary = cmd_run(&cfg, &out, resume.as_deref())?;
            println!("{}", summary.final_record_json);
            summary.into_result()
        }
        Command::Verify { config, out } => cmd_verify(config.as_deref(), out.as_deref()),
        Command::Sweep { config, out, workers, stride } => {
            let mut cfg = load_sweep_config(&config)?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(k) = stride {
                if k == 0 {
                    return Err(CliError::Config("--stride must be >= 1".into()));
                }
                cfg.stride = k;
            }
            let out = out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("mhdcrit-sweep"));
            cmd_sweep(&cfg, &out)
        }
        Command::Diag { dir } => {
            let s = cmd_diag(&dir)?;
            println!(
                "diag: {} records checked against {} checkpoints, max relative deviation {:.3e}",
                s.records_checked, s.checkpoints, s.max_rel_dev
            );
            Ok(())
        }
    }
}

/// Parse `args` (including the program name) and execute; returns the exit
/// status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("mhdcrit: {e}");
            e.exit_code()
        }
    }
}
