use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = fdsic::cli::Cli::parse();
    match fdsic::cli::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
