//! `nsfwave`: Riemann data, wave profiles, long-time runs and property checks
//! for composite waves of the 1D Navier-Stokes-Fourier system.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nsfwave_core::Exec;

use commands::{Ctx, Failure, Which};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "nsfwave", version, about)]
struct Cli {
    /// JSON run configuration; defaults are used for absent fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if needed).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Intermediate states of the rarefaction-contact-shock Riemann problem.
    Riemann,
    /// Sample one wave profile and report its checks.
    Profile {
        #[arg(value_enum)]
        which: Which,
    },
    /// Evolve the perturbed composite wave and record diagnostics.
    Simulate {
        /// Also write a gnuplot script for the diagnostics.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Run the property suites.
    Check,
}

fn threads() -> Result<Option<usize>, String> {
    match std::env::var("NSFWAVE_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("NSFWAVE_THREADS must be a positive integer, got {s:?}")),
        },
    }
}

fn setup_exec(n: Option<usize>) -> Exec {
    #[cfg(feature = "parallel")]
    if let Some(n) = n {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match n {
        Some(1) => Exec::Sequential,
        _ => Exec::Parallel,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = RunConfig::load(cli.config.as_deref()).map_err(Failure::Config)?;
    let exec = setup_exec(threads().map_err(Failure::Config)?);
    if let Some(o) = cli.out {
        cfg.output_dir = Some(o);
    }
    let out = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).map_err(|e| Failure::Construction(format!("{}: {e}", out.display())))?;
    let ctx = Ctx {
        cfg: &cfg,
        hash: cfg.hash(),
        out: &out,
        exec,
    };
    println!("config hash {}", ctx.hash);
    match cli.cmd {
        Cmd::Riemann => commands::riemann(&ctx),
        Cmd::Profile { which } => commands::profile(&ctx, which),
        Cmd::Simulate { gnuplot } => commands::simulate(&ctx, gnuplot),
        Cmd::Check => commands::check(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
