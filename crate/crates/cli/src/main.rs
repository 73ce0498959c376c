//! `hsq`: certificates, lift verification, homogeneous norms and inequality
//! harnesses for homogeneous Hörmander systems.
//!
//! Exit codes: 0 pass, 1 usage or parse error, 2 certified failure,
//! 3 numerical soft failure (quadrature tolerance exceeded).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "hsq", version, about = "Homogeneous Hörmander systems: certificates, lifts and Sobolev-type constants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check homogeneity of the fields and the rank condition at the origin.
    Check {
        system: PathBuf,
        /// Longest bracket considered; defaults to the largest dilation exponent.
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a Carnot-group lift: group axioms and the lifting identities.
    VerifyLift {
        lift: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Homogeneous norm of a point, given as comma-separated coordinates.
    Norm {
        system: PathBuf,
        #[arg(allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the inequality harnesses described by a configuration file.
    Harness {
        config: PathBuf,
        /// Overrides the quadrature resolution of the configuration.
        #[arg(long)]
        resolution: Option<usize>,
        /// Overrides the quadrature seed of the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; a CSV of the ratio rows is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Check { system, max_depth, out } => commands::check(&system, max_depth, out.as_deref()),
        Command::VerifyLift { lift, out } => commands::verify_lift(&lift, out.as_deref()),
        Command::Norm { system, point, out } => commands::norm(&system, &point, out.as_deref()),
        Command::Harness {
            config,
            resolution,
            seed,
            out,
        } => commands::harness(&config, resolution, seed, out.as_deref()),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
