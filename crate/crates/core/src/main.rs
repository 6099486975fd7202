use std::process::ExitCode;

use clap::Parser;
use jcladder::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("jcladder {}: {e}", cli.command.name());
            ExitCode::FAILURE
        }
    }
}
