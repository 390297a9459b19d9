//! `hypercolor`: command-line driver.
//!
//! Every subcommand writes its result to `--out` (stdout when absent) and a
//! one-line summary to stderr. Exit codes: 0 success, 2 parameter error,
//! 3 capacity error, 1 anything else.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use hypercolor::Error;

use args::Cli;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
