mod cli;
mod commands;

use std::process::ExitCode;

use ara_core::par::{self, Execution};
use clap::error::ErrorKind;
use clap::Parser;

use crate::cli::{Cli, Command};
use crate::commands::Globals;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let execution = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        Some(1) => Execution::Sequential,
        Some(n) => {
            par::set_threads(n);
            Execution::Parallel
        }
        None => Execution::Parallel,
    };
    let globals = Globals {
        seed: cli.seed,
        execution,
    };

    let result = match &cli.command {
        Command::Profile(a) => commands::profile(a, &globals),
        Command::Genetic(a) => commands::genetic(a),
        Command::Features(a) => commands::features(a, &globals),
        Command::Train(a) => commands::train(a, &globals),
        Command::Eval(a) => commands::eval(a, &globals),
        Command::Matrix(a) => commands::matrix(a, &globals),
        Command::Compare(a) => commands::compare(a),
    };

    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable output"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
