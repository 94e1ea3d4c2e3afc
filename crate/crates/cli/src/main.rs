use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod manifest;
mod output;
mod svg;

/// Exit code for configuration/validation problems.
pub const EXIT_CONFIG: u8 = 2;
/// Exit code for numerical failures.
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mobicell",
    version,
    about = "Mobile-cell resource sharing: analytic evaluation and Monte Carlo simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the analytic expressions over the configured grid.
    Analytic(RunArgs),
    /// Run a Monte Carlo experiment at a single parameter point.
    Simulate(RunArgs),
    /// Sweep a parameter: one experiment per grid point, analytic values
    /// alongside.
    Sweep(RunArgs),
    /// Access-link power control: map AL success targets to transmit
    /// powers and the resulting backhaul success.
    PowerControl(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Also emit an SVG plot next to the CSV.
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Analytic(a) => ("analytic", a),
        Command::Simulate(a) => ("simulate", a),
        Command::Sweep(a) => ("sweep", a),
        Command::PowerControl(a) => ("power-control", a),
    };
    match commands::run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(err.exit_code())
        }
    }
}
