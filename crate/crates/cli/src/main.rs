//! `wosa`: approximate Welch band-power extraction and design-space
//! exploration over (cluster, cores, frequency, approximation level)
//! configurations.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "wosa",
    version,
    about = "Approximate Welch band-power features and power-performance-accuracy sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract per-epoch band-power features from a recording.
    Extract(commands::ExtractArgs),
    /// Sweep (cluster, cores, frequency, level) configurations into a
    /// power-performance-accuracy CSV plus a JSON manifest.
    Sweep(commands::SweepArgs),
    /// Filter a sweep CSV down to its 3-D Pareto front.
    Pareto(commands::ParetoArgs),
    /// Reshape a sweep CSV into plot-ready whitespace-separated tables.
    Plotdata(commands::PlotdataArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(args) => commands::extract(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Pareto(args) => commands::pareto(&args),
        Command::Plotdata(args) => commands::plotdata(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
