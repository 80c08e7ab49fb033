//! Command-line entry point tying generation, clustering, and benchmarking
//! into reproducible runs.
//!
//! Exit codes are a stable contract for scripting: 0 on success, 1 when
//! `compare` finds a mismatch, 2 on usage or input errors.

use std::process::ExitCode;

use clap::Parser;

mod cli;
mod commands;

use cli::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => commands::gen::execute(args),
        Command::Cluster(args) => commands::cluster::execute(args),
        Command::Bench(args) => commands::bench::execute(args),
        Command::Compare(args) => commands::compare::execute(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
