use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ewf_core::scenarios::LFConfig;
use ewf_core::Sign;
use serde::{Deserialize, Serialize};

use crate::output::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ewf",
    version,
    about = "Extended Wigner's friend scenarios: states, simulations and joint-distribution checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON file with default values for any flag; flags given on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Number of simulated runs.
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<u64>,

    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,

    /// Measurement angles in degrees: ask_A,super_A,ask_C,super_C.
    #[arg(long, global = true, value_name = "a,b,c,d", value_parser = parse_angles)]
    pub angles: Option<LFConfig>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// The basic friend state, its Born table and the frame-relational lab state.
    Basic {
        /// Amplitude of |down,down>.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        /// Amplitude of |up,up>.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Friend's recorded outcome, +1 or -1.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
        outcome: Option<Sign>,
    },
    /// Simulate the four pairings and estimate the CHSH value.
    Lf,
    /// Decide whether a joint distribution reproduces pairwise targets.
    Feasibility {
        /// Targets JSON: {"AC": [[pp,pm],[mp,mm]], "AD": ..., "BC": ..., "BD": ...}.
        #[arg(long, value_name = "FILE", conflicts_with = "from_angles")]
        targets: Option<PathBuf>,
        /// Use the Born tables at --angles as targets (the default).
        #[arg(long)]
        from_angles: bool,
    },
    /// Run and audit the frame-relational model.
    Relmodel {
        /// Corrupt a few records to exercise the audit failure path.
        #[arg(long, hide = true)]
        plant_violation: bool,
        /// Also write every run as JSON lines to this file.
        #[arg(long, value_name = "PATH")]
        records: Option<PathBuf>,
    },
    /// Sequential-measurement scenario: states and consistency of reports.
    Rovelli {
        /// First outcome that triggers the second measurement, +1 or -1.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
        trigger: Option<Sign>,
    },
    /// Run the full acceptance suite and print a pass/fail matrix.
    Accept,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Basic { .. } => "basic",
            Command::Lf => "lf",
            Command::Feasibility { .. } => "feasibility",
            Command::Relmodel { .. } => "relmodel",
            Command::Rovelli { .. } => "rovelli",
            Command::Accept => "accept",
        }
    }

    fn default_trials(&self) -> u64 {
        match self {
            Command::Lf | Command::Relmodel { .. } => 400_000,
            Command::Rovelli { .. } => 10_000,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

pub fn parse_angles(text: &str) -> Result<LFConfig, String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad angle `{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    let [a, b, c, d] = parts[..] else {
        return Err(format!("expected four comma-separated angles, got {}", parts.len()));
    };
    LFConfig::new(a, b, c, d).map_err(|e| e.to_string())
}

pub fn parse_sign(text: &str) -> Result<Sign, String> {
    match text.trim() {
        "+1" | "1" | "+" => Ok(Sign::Plus),
        "-1" | "-" => Ok(Sign::Minus),
        other => Err(format!("expected +1 or -1, got `{other}`")),
    }
}

/// Angles in a config file: an object with `ask_A` etc., a list of four
/// numbers, or the same string the flag takes.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum AnglesValue {
    Named(LFConfig),
    List([f64; 4]),
    Text(String),
}

impl AnglesValue {
    fn resolve(self) -> Result<LFConfig, String> {
        match self {
            AnglesValue::Named(c) => Ok(c),
            AnglesValue::List([a, b, c, d]) => LFConfig::new(a, b, c, d).map_err(|e| e.to_string()),
            AnglesValue::Text(t) => parse_angles(&t),
        }
    }
}

fn sign_from_json(v: serde_json::Value) -> Result<Sign, String> {
    match v {
        serde_json::Value::Number(n) => {
            n.as_i64().and_then(Sign::from_value).ok_or_else(|| format!("expected +1 or -1, got {n}"))
        }
        serde_json::Value::String(s) => parse_sign(&s),
        other => Err(format!("expected +1 or -1, got {other}")),
    }
}

/// Config file contents. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    trials: Option<u64>,
    seed: Option<u64>,
    angles: Option<AnglesValue>,
    format: Option<Format>,
    out: Option<PathBuf>,
    targets: Option<PathBuf>,
    from_angles: Option<bool>,
    records: Option<PathBuf>,
    a: Option<f64>,
    b: Option<f64>,
    outcome: Option<serde_json::Value>,
    trigger: Option<serde_json::Value>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct Settings {
    pub command: Command,
    pub trials: u64,
    pub seed: u64,
    pub angles: LFConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 42;

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
}

impl Settings {
    pub fn resolve(cli: Cli) -> Result<Settings, CliError> {
        let file = match &cli.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };
        let input = CliError::Input;
        let file_angles = file.angles.map(AnglesValue::resolve).transpose().map_err(input)?;
        let file_sign = |v: Option<serde_json::Value>| v.map(sign_from_json).transpose().map_err(CliError::Input);
        let command = match cli.command {
            Command::Basic { a, b, outcome } => Command::Basic {
                a: a.or(file.a),
                b: b.or(file.b),
                outcome: match outcome {
                    Some(o) => Some(o),
                    None => file_sign(file.outcome)?,
                },
            },
            Command::Feasibility { targets, from_angles } => {
                let from_angles = from_angles || (targets.is_none() && file.from_angles == Some(true));
                let targets = if from_angles { None } else { targets.or(file.targets) };
                Command::Feasibility { from_angles: targets.is_none(), targets }
            }
            Command::Relmodel { plant_violation, records } => {
                Command::Relmodel { plant_violation, records: records.or(file.records) }
            }
            Command::Rovelli { trigger } => Command::Rovelli {
                trigger: match trigger {
                    Some(t) => Some(t),
                    None => file_sign(file.trigger)?,
                },
            },
            c => c,
        };
        let trials = cli.trials.or(file.trials).unwrap_or_else(|| command.default_trials());
        if trials == 0 {
            return Err(CliError::Input("--trials must be at least 1".into()));
        }
        Ok(Settings {
            trials,
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            angles: cli.angles.or(file_angles).unwrap_or_default(),
            format: cli.format.or(file.format).unwrap_or_default(),
            out: cli.out.or(file.out),
            command,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_flag() {
        assert_eq!(parse_angles("0,90,45,135").unwrap(), LFConfig::default());
        assert!(parse_angles("0,90,45").is_err());
        assert!(parse_angles("0,90,45,400").is_err());
        assert!(parse_angles("0,x,45,135").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"trials": 500, "seed": 9, "angles": [10, 20, 30, 40], "format": "json", "trigger": -1}"#,
        )
        .unwrap();
        let cli = Cli::parse_from(["ewf", "rovelli", "--config", path.to_str().unwrap(), "--seed", "3"]);
        let s = Settings::resolve(cli).unwrap();
        assert_eq!((s.trials, s.seed, s.format), (500, 3, Format::Json));
        assert_eq!(s.angles, LFConfig::new(10.0, 20.0, 30.0, 40.0).unwrap());
        assert!(matches!(s.command, Command::Rovelli { trigger: Some(Sign::Minus) }));

        std::fs::write(&path, r#"{"trails": 5}"#).unwrap();
        let cli = Cli::parse_from(["ewf", "lf", "--config", path.to_str().unwrap()]);
        assert!(matches!(Settings::resolve(cli), Err(CliError::Input(_))));
    }

    #[test]
    fn defaults() {
        let s = Settings::resolve(Cli::parse_from(["ewf", "lf"])).unwrap();
        assert_eq!((s.trials, s.seed, s.format), (400_000, DEFAULT_SEED, Format::Table));
        let s = Settings::resolve(Cli::parse_from(["ewf", "feasibility"])).unwrap();
        assert!(matches!(s.command, Command::Feasibility { from_angles: true, targets: None }));
        assert!(Settings::resolve(Cli::parse_from(["ewf", "lf", "--trials", "0"])).is_err());
    }
}
