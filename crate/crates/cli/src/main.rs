mod config;
mod dataset;
mod extract;
mod inspect;
mod render;
mod simulate;

use std::process::ExitCode;

use airguard::Error;
use clap::{CommandFactory, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "airguard", version, about = "Simulate OFDM sensing echoes of UAVs and birds and build feature-image datasets")]
struct Cli {
    /// Print a JSON summary on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize an echo matrix for one target and motion model.
    Simulate(simulate::SimulateArgs),
    /// Compute cmD and HRRP spectra of an echo file and render them.
    Extract(extract::ExtractArgs),
    /// Generate a labeled feature-image dataset with manifest and splits.
    Dataset(dataset::DatasetArgs),
    /// Render a raw feature matrix file to PNG.
    Render(render::RenderArgs),
    /// Print the headers of echo, feature or trajectory files.
    Inspect(inspect::InspectArgs),
}

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Missing or conflicting arguments: printed with usage, exit 2.
    Usage { subcommand: &'static str, message: String },
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(subcommand: &'static str, message: impl Into<String>) -> CliError {
    CliError::Usage {
        subcommand,
        message: message.into(),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Numeric(_) | Error::Degenerate(_) => 1,
        _ => 2,
    }
}

/// Writes the summary: `value` as JSON under `--json`, `text` otherwise.
pub fn emit(json: bool, value: &serde_json::Value, text: &str) {
    if json {
        println!("{value}");
    } else {
        println!("{text}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info })
        .parse_default_env()
        .init();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate::run(a, cli.json),
        Command::Extract(a) => extract::run(a, cli.json),
        Command::Dataset(a) => dataset::run(a, cli.json),
        Command::Render(a) => render::run(a, cli.json),
        Command::Inspect(a) => inspect::run(a, cli.json),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage { subcommand, message }) => {
            let mut cmd = Cli::command();
            cmd.build();
            let sub = cmd.find_subcommand_mut(subcommand).expect("known subcommand");
            let err = sub.error(clap::error::ErrorKind::MissingRequiredArgument, message);
            let _ = err.print();
            ExitCode::from(2)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
