//! `kokotsakis`: flexibility checks, flexion simulation, resultant
//! certificates and family generation from the command line.
//!
//! Exit codes: 0 flexible (or success), 1 rigid, 2 degenerate or unreadable
//! input.

mod certify;
mod check;
mod generate;
mod output;
mod simulate;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "kokotsakis", version, about = "Flexibility analysis of Kokotsakis meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Infinitesimal test, incidence cross-check and higher-order derivative
    /// test for mesh documents.
    Check(check::Args),
    /// Integrate the flexion flow, writing OBJ frames and a CSV monitor.
    Simulate(simulate::Args),
    /// Resultant certificate for quadrilateral angle documents.
    Certify(certify::Args),
    /// Seeded member of a flexible family as mesh and angle documents.
    Generate(generate::Args),
}

/// Parses `LO..HI` (inclusive, either bound may be negative).
pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// Strictly positive finite float.
pub fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check(a) => check::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Certify(a) => certify::run(&a),
        Command::Generate(a) => generate::run(&a),
    };
    ExitCode::from(code)
}
