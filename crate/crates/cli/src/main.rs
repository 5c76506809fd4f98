use std::process::ExitCode;

use clap::Parser;
use dressed_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) if outcome.diagnostics.is_empty() => ExitCode::SUCCESS,
        Ok(outcome) => {
            for d in &outcome.diagnostics {
                eprintln!("diagnostic: {d}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
