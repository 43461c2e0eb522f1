//! `lookback`: validate calibrators, play games, and price targets.
//!
//! Exit status is 0 on success, 1 when a guarantee or verdict fails, and 2
//! for usage errors and malformed or unplayable configurations.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "lookback",
    version,
    about = "Capital calibration for competitive scepticism games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a calibrator and show its completion, measure or falsification.
    Validate(Common),
    /// Play one game and write its transcript.
    Simulate(Common),
    /// Play one game with an insured Rival Sceptic.
    Insure(Common),
    /// Superhedging price of a target on the coin game.
    Tightness(Common),
    /// Play many seeded games and report the worst guarantee slack.
    MonteCarlo(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides the configuration's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// How a successfully executed command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LOOKBACK_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(args) => commands::validate(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Insure(args) => commands::insure(args),
        Command::Tightness(args) => commands::tightness(args),
        Command::MonteCarlo(args) => commands::monte_carlo(args),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
