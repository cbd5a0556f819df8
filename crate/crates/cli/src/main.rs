mod commands;
mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ineq_forge::constants::ExponentParams;

use crate::commands::{KernelArgs, VerifyArgs};

/// Sharp constants, correction kernels, heat kernels and inequality checks
/// on hyperbolic space and model manifolds.
#[derive(Parser)]
#[command(name = "ineq-forge", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the constants for (N, p) as JSON.
    Constants {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        p: f64,
        /// adds GN1 (alpha > 1) or GN2 (alpha < 1)
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = "sinh")]
        manifold: String,
    },
    /// Scan the correction kernel and its quotient.
    Kernel {
        #[arg(long, default_value = "sinh")]
        manifold: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1e-3)]
        tmin: f64,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        /// write the t,psi,phi,k,quotient table here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Audit the sufficient conditions on a warping function.
    Conditions {
        #[arg(long, default_value = "sinh")]
        manifold: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1e-3)]
        tmin: f64,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
    /// Evaluate one inequality on one profile.
    Verify {
        #[arg(long)]
        inequality: String,
        #[arg(long)]
        profile: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        p: f64,
        /// defaults to `id` for Euclidean inequalities, `sinh` otherwise
        #[arg(long)]
        manifold: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        q0: Option<f64>,
    },
    /// Run every suite of a config file and write the report directory.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Heat-kernel self-tests.
    Heat {
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
}

fn dispatch(cmd: Cmd) -> error::CliResult<()> {
    match cmd {
        Cmd::Constants { dim, p, alpha, manifold } => commands::constants(dim, p, alpha, &manifold),
        Cmd::Kernel { manifold, dim, p, tmin, tmax, grid, csv } => {
            commands::kernel(&KernelArgs { manifold, n: dim, p, tmin, tmax, grid, csv })
        }
        Cmd::Conditions { manifold, dim, p, tmin, tmax, grid } => {
            commands::conditions(&manifold, dim, p, (tmin, tmax, grid))
        }
        Cmd::Verify { inequality, profile, dim, p, manifold, alpha, q, s, lambda, a, b, q0 } => {
            let params = ExponentParams { n: dim, p, alpha, q, s, lambda, q0, a, b };
            commands::verify(&VerifyArgs { inequality, profile, manifold, params })
        }
        Cmd::Run { config } => commands::run(&config),
        Cmd::Heat { dim } => commands::heat(dim),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ineq-forge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
