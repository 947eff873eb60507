pub mod commands;
pub mod config;
pub mod output;

use config::{Cli, Settings};
use output::{write_text, CliError, Status};

/// Runs a parsed command line and returns the exit code.
pub fn main_with(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<Status, CliError> {
    let settings = Settings::resolve(cli)?;
    let outcome = commands::run(&settings)?;
    let text = outcome.render(settings.format).expect("format checked before running");
    match &settings.out {
        Some(path) => write_text(path, text)?,
        None => print!("{text}"),
    }
    Ok(outcome.status)
}
