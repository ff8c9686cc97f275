use std::process::ExitCode;

use clap::Parser;
use vemsupg::cli::{self, Cli};
use vemsupg::pipeline;

fn main() -> ExitCode {
    let args = Cli::parse();
    match pipeline::with_pool(|| cli::run(args)).map_err(anyhow::Error::from).and_then(|r| r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
