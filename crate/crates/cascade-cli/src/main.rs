//! `cascade`: tables, curves and Monte Carlo runs for buy-cascade
//! probabilities under a fixed fraction of always-buy fake agents.
//!
//! Every subcommand writes one table (CSV by default, JSON with
//! `--format json`) to stdout or `--out`, and exits 0 on success or 2 on any
//! invalid input, with a one-line message on stderr.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cascade_core::analytic::STAGES_DEFAULT;
use cascade_core::model::TrueValue;
use cascade_core::thresholds::GUARD_TOL;
use clap::{Parser, Subcommand};

use commands::{CliError, GridSpec};
use output::{emit, OutputFormat, TableRow};

#[derive(Parser)]
#[command(
    name = "cascade",
    version,
    about = "Buy-cascade probabilities in sequential learning with fake agents",
    propagate_version = true
)]
struct RunConfig {
    #[command(subcommand)]
    command: Command,

    /// Output table format
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,

    /// Write the table to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Guard-band half-width around integer 1/eta; analytic evaluation
    /// switches to the one-sided closed forms inside the band
    #[arg(long, global = true, default_value_t = GUARD_TOL)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Derived quantities (a, b, eta, alpha, p_f, r) at one parameter point
    Derive {
        /// Private signal quality, in (0.5, 1)
        #[arg(long)]
        p: f64,
        /// Fraction of fake agents, in [0, 1)
        #[arg(long)]
        eps: f64,
        /// True state of the world: G or B
        #[arg(long)]
        v: TrueValue,
    },
    /// Threshold fractions eps_r where the buy-cascade curve jumps
    Thresholds {
        /// Signal-quality grid start:stop:step
        #[arg(long, default_value = "0.55:0.95:0.01")]
        p_grid: GridSpec,
        /// Largest threshold index to report
        #[arg(long, default_value_t = 6)]
        r_max: u64,
    },
    /// Buy-cascade probability at one parameter point
    Pycas {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        v: TrueValue,
        /// Truncation depth of the recursion
        #[arg(long, default_value_t = STAGES_DEFAULT)]
        stages: usize,
    },
    /// Buy-cascade probability over an eps grid, with the one-sided values
    /// at every threshold the grid crosses
    Curve {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        v: TrueValue,
        /// Fake-fraction grid start:stop:step
        #[arg(long, default_value = "0:0.95:0.005")]
        eps_grid: GridSpec,
        #[arg(long, default_value_t = STAGES_DEFAULT)]
        stages: usize,
    },
    /// Monte Carlo estimate of the buy-cascade probability
    Simulate {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        v: TrueValue,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Agents per trial before a walk counts as undecided
        #[arg(long, default_value_t = cascade_core::monte_carlo::DEFAULT_HORIZON)]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads; 0 uses one per available core. The counts are
        /// identical for every setting
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Formal eps=0 value, both one-sided limits, and the value at a chosen
    /// eps, over a signal-quality grid
    Limits {
        #[arg(long, default_value = "0.55:0.95:0.01")]
        p_grid: GridSpec,
        /// Fake fraction for the comparison column
        #[arg(long, default_value_t = 0.9)]
        eps: f64,
        #[arg(long, default_value_t = STAGES_DEFAULT)]
        stages: usize,
    },
    /// Smallest fake fraction at which the buy-cascade probability climbs
    /// back to its no-fakes value
    FindEpsLower {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        v: TrueValue,
        /// Scan resolution in eps
        #[arg(long, default_value_t = 1e-3)]
        grid_step: f64,
        /// Bisection stopping width after the scan brackets the crossing
        #[arg(long, default_value_t = 1e-6)]
        refine_tol: f64,
    },
}

fn run(config: RunConfig) -> Result<(), CliError> {
    if !(config.tol > 0.0 && config.tol < 0.5) {
        return Err(CliError::Usage(format!(
            "tol must be in (0, 0.5), got {}",
            config.tol
        )));
    }
    let tol = config.tol;
    match &config.command {
        Command::Derive { p, eps, v } => {
            let rows = commands::cmd_derive(*p, *eps, *v)?;
            write_rows(&rows, &config)
        }
        Command::Thresholds { p_grid, r_max } => {
            let rows = commands::cmd_thresholds(p_grid, *r_max)?;
            write_rows(&rows, &config)
        }
        Command::Pycas { p, eps, v, stages } => {
            let rows = commands::cmd_pycas(*p, *eps, *v, *stages, tol)?;
            write_rows(&rows, &config)
        }
        Command::Curve {
            p,
            v,
            eps_grid,
            stages,
        } => {
            let rows = commands::cmd_curve(*p, *v, eps_grid, *stages, tol)?;
            write_rows(&rows, &config)
        }
        Command::Simulate {
            p,
            eps,
            v,
            trials,
            horizon,
            seed,
            threads,
        } => {
            let rows = commands::cmd_simulate(*p, *eps, *v, *trials, *horizon, *seed, *threads)?;
            write_rows(&rows, &config)
        }
        Command::Limits {
            p_grid,
            eps,
            stages,
        } => {
            let rows = commands::cmd_limits(p_grid, *eps, *stages, tol)?;
            write_rows(&rows, &config)
        }
        Command::FindEpsLower {
            p,
            v,
            grid_step,
            refine_tol,
        } => {
            let rows = commands::cmd_find_eps_lower(*p, *v, *grid_step, *refine_tol)?;
            write_rows(&rows, &config)
        }
    }
}

fn write_rows<R: TableRow>(rows: &[R], config: &RunConfig) -> Result<(), CliError> {
    match &config.out {
        Some(path) => {
            let mut writer = BufWriter::new(File::create(path)?);
            emit(rows, config.format, &mut writer)?;
            writer.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            emit(rows, config.format, &mut writer)?;
            writer.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
