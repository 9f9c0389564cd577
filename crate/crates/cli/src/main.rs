use std::process::ExitCode;

use clap::Parser;

use scfdma_cli::{args, run};

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match run::dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
