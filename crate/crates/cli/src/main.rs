//! `dunkl`: command-line front end for `dunkl-core`.
//!
//! Exit codes: 0 on success, 1 when a check fails or a computation errors,
//! 2 for invalid configuration or arguments.

mod commands;
mod config;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dunkl_core::DunklError;

use config::{CommonArgs, RunConfig};

/// Bad user input, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(
    name = "dunkl",
    version,
    about = "Rational Dunkl theory: exact Hermite bases, Dunkl kernel, transform and heat semigroup",
    after_help = "Multi-indices and coordinate indices are 0-based. Grids are a:b:n or comma lists; \
                  in rank N the grid is the N-fold product of the axis values.\n\
                  DUNKL_PRECISION (digits, 16..=4096) is validated but moments are exact anyway.\n\
                  Exit codes: 0 ok, 1 check failure or runtime error, 2 bad configuration."
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Orthonormal generalized Hermite basis as JSON (exact coefficients).
    Basis,
    /// Tensor quadrature rule for w_k(x) e^{-|x|²} as JSON.
    Quad,
    /// Dunkl kernel K(x,y) on a grid of point pairs; exit 1 if any value misses --tol.
    Kernel {
        /// Axis values for x.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Axis values for y (default: same as x).
        #[arg(long, allow_hyphen_values = true)]
        ygrid: Option<String>,
    },
    /// Dunkl heat semigroup.
    Heat {
        #[command(subcommand)]
        action: HeatCommand,
    },
    /// Dunkl transform of an initial profile.
    Transform {
        /// one, gaussian[:a] or hermite:i,j,...
        #[arg(long = "f", default_value = "gaussian")]
        profile: String,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Full identity suite as JSON; exit 1 on any failure.
    Check {
        /// Flip the difference term of T_1 (the suite should then fail).
        #[arg(long)]
        mutate: bool,
    },
}

#[derive(Subcommand)]
enum HeatCommand {
    /// u(x,t) = H(t)f(x) on a grid, with the kernel mass.
    Solve {
        /// one, gaussian[:a] or hermite:i,j,...
        #[arg(long = "f", default_value = "gaussian")]
        profile: String,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value = "0.5,1")]
        times: String,
    },
    /// Heat identities and the maximum principle probe as JSON.
    Check,
}

fn is_config_error(e: &DunklError) -> bool {
    matches!(
        e,
        DunklError::UnknownFamily(_)
            | DunklError::InvalidRank { .. }
            | DunklError::InvalidDihedralOrder(_)
            | DunklError::MultiplicityArity { .. }
            | DunklError::NegativeMultiplicity(_)
            | DunklError::BadRational(_)
            | DunklError::DegreeCap { .. }
            | DunklError::InexactRoots
            | DunklError::CostGuard(_)
    )
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let usage = err.chain().any(|c| {
        c.downcast_ref::<UsageError>().is_some() || c.downcast_ref::<DunklError>().is_some_and(is_config_error)
    });
    if usage {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let precision = std::env::var("DUNKL_PRECISION").ok();
    let cfg = RunConfig::resolve(&cli.common, precision.as_deref()).map_err(UsageError)?;
    match cli.command {
        Command::Basis => commands::basis(&cfg),
        Command::Quad => commands::quad(&cfg),
        Command::Kernel { grid, ygrid } => commands::kernel(&cfg, &grid, ygrid.as_deref()),
        Command::Heat { action } => match action {
            HeatCommand::Solve { profile, grid, times } => commands::heat_solve(&cfg, &profile, &grid, &times),
            HeatCommand::Check => commands::heat_check(&cfg),
        },
        Command::Transform { profile, grid } => commands::transform(&cfg, &profile, &grid),
        Command::Check { mutate } => commands::check(&cfg, mutate),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dunkl: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
