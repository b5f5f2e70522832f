//! `adasharp`: partition-guided sharpening toolkit.
//!
//! Exit codes: 0 success, 1 internal/computation errors, 2 argument and
//! configuration errors, 3 I/O errors. Messages go to stderr.

mod args;
mod commands;
mod config;
mod fail;
mod frames;
mod pattern;
mod plot;

use std::process::ExitCode;

use clap::Parser;

/// CTU-partition-guided region-adaptive sharpening, degradation pair
/// generation, and rate-quality evaluation against external encoders.
#[derive(Parser)]
#[command(name = "adasharp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Compute per-frame CTU quadtree partition masks (PGM files).
    Partition(commands::partition::PartitionArgs),
    /// Degrade ground truth into the low-quality half of a training pair.
    Degrade(commands::degrade::DegradeArgs),
    /// Apply region-adaptive unsharp masking guided by partition masks.
    Sharpen(commands::sharpen::SharpenArgs),
    /// Score a distorted sequence against a reference (JSON report).
    Metrics(commands::metrics::MetricsArgs),
    /// Sweep a CRF ladder through an external encoder; emit RD curves and
    /// a manifest.
    RdSweep(commands::sweep::SweepArgs),
    /// Bjontegaard delta rate between two RD-curve CSVs.
    Bdrate(commands::bdrate::BdrateArgs),
    /// Run the whole chain from one config file: partition, degrade,
    /// sharpen, metrics, and (with an encoder) sweeps, BD-Rate, and plots.
    Pipeline(commands::pipeline::PipelineArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Partition(args) => commands::partition::run(args),
        Command::Degrade(args) => commands::degrade::run(args),
        Command::Sharpen(args) => commands::sharpen::run(args),
        Command::Metrics(args) => commands::metrics::run(args),
        Command::RdSweep(args) => commands::sweep::run(args),
        Command::Bdrate(args) => commands::bdrate::run(args),
        Command::Pipeline(args) => commands::pipeline::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            ExitCode::from(fail.exit_code)
        }
    }
}
