mod commands;
mod config;
mod emit;
mod error;

use std::process::ExitCode;

use clap::Parser;

use config::Cli;
use error::CliError;

const EXIT_WARNED: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(warned) if warned && cli.strict => ExitCode::from(EXIT_WARNED),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let outcome = commands::run(&cli.command, cli.format)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    emit::write(&outcome.text, cli.output.as_deref()).map_err(|source| CliError::Output {
        path: cli
            .output
            .as_ref()
            .map_or_else(|| "stdout".to_string(), |p| p.display().to_string()),
        source,
    })?;
    Ok(!outcome.warnings.is_empty())
}
