//! `cleb`: seeded, reproducible experiment runner.
//!
//! Exit status: 0 when every check passed, 1 when a check failed,
//! 2 on configuration or I/O errors.

mod config;
mod run;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = config::Cli::parse();
    match run::dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
