//! Command-line front end for the scenario runner.
//!
//! `qlogic run --config <file>` executes a scenario and prints its report;
//! `qlogic validate --config <file>` only parses the config and echoes its
//! digest. The process exit code encodes the outcome: 0 when every check
//! passed, 1 when a check failed, 2 for normalization violations in the
//! config, 3 for an unknown scenario name, 4 for syntax errors, 5 for
//! dimension mismatches, and 6 for file I/O problems.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qlogic::scenario::{parse_config, run_scenario, Config, Format, ScenarioError};

#[derive(Parser)]
#[command(name = "qlogic", version, about = "Runs projective-measurement scenarios from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Executes a scenario and prints or writes its report.
    Run {
        /// Path to the scenario config.
        #[arg(long)]
        config: PathBuf,
        /// Report format.
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Overrides the seed from the config.
        #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
        seed: Option<u64>,
        /// Overrides the trial count from the config.
        #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
        trials: Option<u64>,
        /// Writes the report to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parses and validates a config without running it.
    Validate {
        /// Path to the scenario config.
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(value: OutputFormat) -> Self {
        match value {
            OutputFormat::Text => Format::Text,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn load(path: &Path) -> Result<Config, ScenarioError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn dispatch(cli: Cli) -> Result<ExitCode, ScenarioError> {
    match cli.command {
        Command::Run { config, format, seed, trials, out } => {
            let mut cfg = load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            let output = run_scenario(&cfg)?;

            if let (Some(path), Some(records)) = (&cfg.records, &output.records) {
                fs::write(path, records)
                    .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
            }

            let rendered = output.report.emit(format.into());
            match out.as_ref().or(cfg.out.as_ref()) {
                Some(path) => fs::write(path, &rendered)
                    .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?,
                None => print!("{rendered}"),
            }

            Ok(if output.report.verdict() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("ok: scenario {} (digest {})", cfg.scenario.name(), cfg.digest());
            Ok(ExitCode::SUCCESS)
        }
    }
}
