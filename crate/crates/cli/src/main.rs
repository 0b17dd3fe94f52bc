//! Command-line front end for the temporal Bell overlap, violation-map,
//! pseudo-probability and rf-SQUID analyses.
//!
//! Exit codes: 0 on success, 1 on computational failure, 2 on configuration
//! errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;

#[derive(Parser)]
#[command(name = "temporal-bell", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set n_time=512` or `--set squid.I_c=3e-6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Overlap integrals O_I(ξ), O_II(ξ) and the thresholds ξ_I, ξ_II.
    OverlapCurve(Common),
    /// ΔP and the effective uncertainties on the time grid.
    ViolationMap(Common),
    /// Derived double-well quantities for both potential forms.
    SquidReport(Common),
    /// Reconstructed three-time pseudo-probabilities on the time grid.
    PseudoMap(Common),
}

type Action = fn(&config::RunConfig) -> Result<(), Failure>;

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, action): (Common, Action) = match cli.command {
        Command::OverlapCurve(c) => (c, commands::overlap_curve),
        Command::ViolationMap(c) => (c, commands::violation_map),
        Command::SquidReport(c) => (c, commands::squid_report),
        Command::PseudoMap(c) => (c, commands::pseudo_map),
    };
    let text = commands::read_config(common.config.as_deref())?;
    let cfg = config::parse_config(text.as_deref(), &common.overrides)?;
    action(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
