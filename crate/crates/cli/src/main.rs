//! `spinreal` command-line tool.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 when the
//! input or the command line is invalid.

mod commands;
mod files;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinreal::algebra::RealVec3;
use spinreal::DEFAULT_TOL;

#[derive(Parser, Debug)]
#[command(name = "spinreal", version, about = "Realizability checks for open qubit systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a system against the realizability and commutation conditions.
    Check(CheckArgs),
    /// Recover the Hamiltonian and coupling coefficients of a realizable system.
    Extract(ExtractArgs),
    /// Build the coefficient matrices from a params file.
    Realize(RealizeArgs),
    /// Compare the symbolic Itô expansion with the reduced conditions.
    Oracle(OracleArgs),
    /// Integrate the mean Bloch vector.
    Simulate(SimulateArgs),
    /// Run the built-in identity, implication and oracle checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    path: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    tol: f64,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    path: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    tol: f64,
    /// Write the params file here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RealizeArgs {
    path: PathBuf,
    /// Write the qsde file here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).multiple(true).args(["path", "random"]))]
struct OracleArgs {
    path: Option<PathBuf>,
    /// Sample random systems instead of, or in addition to, reading a file.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    tol: f64,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    path: PathBuf,
    /// Initial Bloch vector.
    #[arg(long, default_value = "0,0,1", value_parser = parse_r0)]
    r0: RealVec3,
    /// Time horizon.
    #[arg(long = "T", default_value_t = 1.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Append the master-equation trajectory and the running maximum deviation.
    #[arg(long)]
    oracle: bool,
    /// Largest allowed deviation from the master equation with `--oracle`.
    #[arg(long, default_value_t = 1e-6, value_parser = parse_tol)]
    tol: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    tol: f64,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("expected a finite non-negative number, got {s:?}")),
    }
}

fn parse_r0(s: &str) -> Result<RealVec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    let mut r = RealVec3::zeros();
    for (i, p) in parts.iter().enumerate() {
        r[i] = p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("bad component {p:?}"))?;
    }
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => commands::check(&a.path, a.tol, a.out.as_deref()),
        Command::Extract(a) => commands::extract(&a.path, a.tol, a.out.as_deref()),
        Command::Realize(a) => commands::realize(&a.path, a.out.as_deref()),
        Command::Oracle(a) => commands::oracle(a.path.as_deref(), a.trials as usize, a.seed, a.tol, a.out.as_deref()),
        Command::Simulate(a) => commands::simulate(&a.path, &a.r0, a.horizon, a.dt, a.oracle, a.tol, a.out.as_deref()),
        Command::Selftest(a) => commands::selftest(a.seed, a.trials as usize, a.tol, a.out.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(commands::InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
