use std::process::ExitCode;

use clap::Parser;
use graphnim_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("graphnim: {e}");
            ExitCode::from(e.code())
        }
    }
}
