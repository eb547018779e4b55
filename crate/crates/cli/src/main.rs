mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dagbench::Error;

/// Compose, classify and evaluate graph-structured GUI-agent tasks.
#[derive(Parser, Debug)]
#[command(name = "dagbench", version)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compose tasks from a bundle's subtask pool under complexity constraints.
    Compose(commands::ComposeArgs),
    /// Print the complexity profile of each task.
    Classify(commands::ClassifyArgs),
    /// List the task files belonging to a capability suite.
    Suite(commands::SuiteArgs),
    /// Replay a trajectory against a task and print the metrics as JSON.
    Evaluate(commands::EvaluateArgs),
    /// Run scripted agents over a batch manifest and write the results CSV.
    Simulate(commands::SimulateArgs),
    /// Cross-verify a subtask's trajectory and evaluation function.
    Verify(commands::VerifyArgs),
    /// Print dataset statistics.
    Stats {
        /// Bundle directory.
        #[arg(long)]
        bundle: PathBuf,
    },
}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_IO: u8 = 3;
pub const EXIT_INVALID_INPUT: u8 = 4;
pub const EXIT_INFEASIBLE: u8 = 5;
pub const EXIT_UNVERIFIED: u8 = 6;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<commands::Unverified>().is_some() {
        return EXIT_UNVERIFIED;
    }
    let Some(e) = err.chain().find_map(|c| c.downcast_ref::<Error>()) else {
        return if err.chain().any(|c| c.is::<std::io::Error>()) {
            EXIT_IO
        } else {
            EXIT_FAILURE
        };
    };
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::Infeasible { .. } => EXIT_INFEASIBLE,
        Error::Schema { .. }
        | Error::DanglingReference { .. }
        | Error::Json(_)
        | Error::Csv(_)
        | Error::Cycle(_)
        | Error::WiringCycle(_)
        | Error::InvalidGraph(_)
        | Error::InvalidSubtask { .. }
        | Error::DuplicateSubtask(_)
        | Error::UnknownSubtask(_)
        | Error::UnknownNode(_)
        | Error::UnknownCapability(_)
        | Error::UnregisteredApplication(_)
        | Error::MissingApplication(_)
        | Error::InvalidConstraint(_)
        | Error::MalformedAction(_)
        | Error::MalformedCheck { .. }
        | Error::UnknownApi(_)
        | Error::MissingBinding(_)
        | Error::MissingParameter { .. }
        | Error::Config(_) => EXIT_INVALID_INPUT,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    let result = match cli.command {
        Command::Compose(args) => commands::compose(args),
        Command::Classify(args) => commands::classify(args),
        Command::Suite(args) => commands::suite(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Verify(args) => commands::verify(args),
        Command::Stats { bundle } => commands::stats(&bundle),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
