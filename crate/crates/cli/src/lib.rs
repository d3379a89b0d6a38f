//! Command-line front end for `threshold-lab`.
//!
//! Subcommands:
//! - `check`: admissibility of the signal pair and cost-family certificates.
//! - `equilibrium`: prevalence, payoff and payoff slope over a threshold grid.
//! - `optimize`: both optimal thresholds and the equivalence verdict.
//! - `sweep`: the coincidence-fraction experiment over a cost family.
//! - `demo`: the worked example end to end.
//!
//! Exit status is 0 on success, 1 on usage or validation errors and 2 when a
//! numeric guardrail fails.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;


use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use threshold_lab::{SearchWindow, SweepMode};

use crate::config::{load_config, validate_tolerances, GridSpec, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "threshold-lab", version, about = "Compliance- vs accuracy-optimal threshold rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check signal-pair admissibility and cost-family certificates.
    Check(ConfigArg),
    /// Tabulate prevalence, payoff and payoff slope over a threshold grid.
    Equilibrium {
        #[command(flatten)]
        config: ConfigArg,
        /// Threshold grid, LO:HI:N.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<GridSpec>,
        /// Write equilibrium.csv and eu_pos.dat here instead of printing CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute both optimal thresholds and the equivalence verdict.
    Optimize {
        #[command(flatten)]
        config: ConfigArg,
        /// Search window, LO:HI:N.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<GridSpec>,
        /// Equivalence tolerance.
        #[arg(long, value_delimiter = ',')]
        tol: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate coincidence fractions over a cost family's parameter box.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// Tolerance ladder, comma separated, strictly descending.
        #[arg(long, value_delimiter = ',')]
        tol: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mode: Option<SweepMode>,
        /// Search window for threshold_distance mode, LO:HI:N.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<GridSpec>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the worked example and write every artifact to a timestamped directory.
    Demo {
        /// Parent directory for the run.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn window(g: GridSpec) -> CliResult<SearchWindow> {
    let w = SearchWindow { lo: g.lo, hi: g.hi, n: g.n };
    w.validate().map_err(|e| CliError::config("--grid", e))?;
    Ok(w)
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Check(ConfigArg { config }) => {
            let cfg = load_config(&config)?;
            let report = commands::check(&cfg)?;
            stdout
                .write_all(output::to_json(&report).as_bytes())
                .map_err(|source| CliError::Write { path: "<stdout>".into(), source })?;
            if report.admissible {
                Ok(())
            } else {
                Err(CliError::config("signal_pair", "pair is not admissible"))
            }
        }
        Command::Equilibrium { config, grid, out } => {
            let mut cfg = load_config(&config.config)?;
            if let Some(g) = grid {
                g.validate("--grid")?;
                cfg.grid = g;
            }
            commands::equilibrium(&cfg, out.as_deref(), stdout)
        }
        Command::Optimize { config, grid, tol, out } => {
            let mut cfg = load_config(&config.config)?;
            if let Some(g) = grid {
                cfg.search = window(g)?;
            }
            if let Some(tol) = tol {
                cfg.tolerance = single_tolerance(&tol)?;
            }
            commands::optimize(&cfg, out.as_deref(), stdout).map(drop)
        }
        Command::Sweep { config, tol, seed, mode, grid, out } => {
            let mut cfg = load_config(&config.config)?;
            apply_sweep_flags(&mut cfg, tol, seed, mode, grid)?;
            commands::sweep(&cfg, out.as_deref(), stdout)
        }
        Command::Demo { out } => commands::demo(out.as_deref(), stdout).map(drop),
    }
}

fn single_tolerance(tol: &[f64]) -> CliResult<f64> {
    match tol {
        [t] if *t > 0.0 && t.is_finite() => Ok(*t),
        [t] => Err(CliError::config("--tol", format!("must be positive, got {t}"))),
        _ => Err(CliError::Usage(format!("optimize takes a single --tol value, got {}", tol.len()))),
    }
}

fn apply_sweep_flags(
    cfg: &mut RunConfig,
    tol: Option<Vec<f64>>,
    seed: Option<u64>,
    mode: Option<SweepMode>,
    grid: Option<GridSpec>,
) -> CliResult<()> {
    if let Some(tol) = tol {
        validate_tolerances(&tol, "--tol")?;
        cfg.sweep.tolerances = tol;
    }
    if let Some(seed) = seed {
        cfg.sweep.seed = seed;
    }
    if let Some(mode) = mode {
        cfg.sweep.mode = mode;
    }
    if let Some(g) = grid {
        cfg.search = window(g)?;
    }
    Ok(())
}
