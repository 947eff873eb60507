pub mod accept;
pub mod basic;
pub mod feasibility;
pub mod lf;
pub mod relmodel;
pub mod rovelli;

use crate::config::{Command, Format, Settings};
use crate::output::{CliError, Outcome};

pub fn run(settings: &Settings) -> Result<Outcome, CliError> {
    let csv_ok = matches!(settings.command, Command::Basic { .. } | Command::Lf | Command::Relmodel { .. });
    if settings.format == Format::Csv && !csv_ok {
        return Err(CliError::Input(format!(
            "{} has no CSV form; use --format json or table",
            settings.command.name()
        )));
    }
    let (trials, seed, angles) = (settings.trials, settings.seed, settings.angles);
    match &settings.command {
        Command::Basic { a, b, outcome } => basic::run(*a, *b, *outcome),
        Command::Lf => lf::run(angles, trials, seed),
        Command::Feasibility { targets, .. } => feasibility::run(targets.as_deref(), &angles),
        Command::Relmodel { plant_violation, records } => {
            relmodel::run(angles, trials, seed, *plant_violation, records.as_deref())
        }
        Command::Rovelli { trigger } => rovelli::run(*trigger, trials, seed),
        Command::Accept => accept::run(seed),
    }
}
