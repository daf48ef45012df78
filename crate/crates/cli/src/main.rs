//! `mcohn`: command-line access to the Minkowski-Cohn moduli surface.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::commands::{MethodChoice, Spacing};
use crate::config::{Overrides, RunConfig, CONFIG_ENV};
use crate::output::{write_table, Format, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl From<minkowski_cohn::Error> for CliError {
    fn from(e: minkowski_cohn::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mcohn",
    version,
    about = "Minkowski-Cohn moduli surface: evaluation, constraint solving, curves of minima"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Config file with `key = value` lines; flags take precedence.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    tol_residual: Option<f64>,

    #[arg(long, global = true)]
    tol_step: Option<f64>,

    #[arg(long, global = true)]
    max_iterations: Option<usize>,

    #[arg(long, global = true)]
    damping: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the surface at one point.
    Eval {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
    },
    /// Corner constants tau_p and sigma_p.
    Bounds {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
    },
    /// Solve the constraint for sigma at one tau.
    SolveSigma {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, value_enum, default_value_t)]
        method: MethodChoice,
        /// Starting sigma for the fixed point.
        #[arg(long)]
        sigma0: Option<f64>,
    },
    /// Trace the constraint curve sigma(tau) over [0, tau_p].
    Trace {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, default_value_t = 101)]
        n: usize,
        #[arg(long, value_enum, default_value_t)]
        spacing: Spacing,
    },
    /// Minimize the surface along the constraint curve.
    Minimize {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Curve of minima over a range of p.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        p_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        p_max: f64,
        #[arg(long, default_value_t = 16)]
        steps: usize,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Values of p where the two corner branches cross.
    Crossing {
        #[arg(long, allow_negative_numbers = true)]
        p_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        p_max: f64,
        #[arg(long, default_value_t = 64)]
        scan_n: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Enumerate small lattice vectors and report interior points.
    VerifyLattice {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, default_value_t = 5)]
        range_n: usize,
    },
    /// Convexity diagnostics of the surface restricted to the constraint curve.
    ConvexityReport {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, default_value_t = 33)]
        grid_n: usize,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let g = &cli.global;
    let grid_override = match &cli.command {
        Command::Minimize { grid_n, .. } | Command::Sweep { grid_n, .. } => *grid_n,
        _ => None,
    };
    let overrides = Overrides {
        tol_residual: g.tol_residual,
        tol_step: g.tol_step,
        max_iterations: g.max_iterations,
        damping: g.damping,
        grid_n: grid_override,
        format: g.format,
        output_path: g.output.clone(),
    };
    let cfg = RunConfig::resolve(g.config.as_deref(), &overrides)?;

    let mut partial_failure = false;
    let table: Table = match cli.command {
        Command::Eval { p, tau, sigma } => commands::eval(p, tau, sigma)?,
        Command::Bounds { p } => commands::bounds(p)?,
        Command::SolveSigma { p, tau, method, sigma0 } => commands::solve_sigma(p, tau, method, sigma0, &cfg)?,
        Command::Trace { p, n, spacing } => commands::trace(p, n, spacing, &cfg)?,
        Command::Minimize { p, .. } => commands::minimize(p, &cfg)?,
        Command::Sweep {
            p_min, p_max, steps, ..
        } => {
            let (t, failed) = commands::sweep_table(p_min, p_max, steps, &cfg)?;
            partial_failure = failed;
            t
        }
        Command::Crossing {
            p_min,
            p_max,
            scan_n,
            tol,
        } => commands::crossing(p_min, p_max, scan_n, tol)?,
        Command::VerifyLattice { p, tau, sigma, range_n } => commands::verify_lattice(p, tau, sigma, range_n)?,
        Command::ConvexityReport { p, grid_n } => commands::convexity_report(p, grid_n, &cfg)?,
    };

    match &cfg.output_path {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
            write_table(&table, cfg.format, BufWriter::new(file))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_table(&table, cfg.format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(partial_failure)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("mcohn: some sweep nodes failed; see the error column");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("mcohn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
