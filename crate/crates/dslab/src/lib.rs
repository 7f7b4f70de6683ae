//! Command-line front end: one JSON document per run, one command per
//! invocation, artifacts written to an output directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::Parser;
use dslab_core::{Category, Error};

use config::{Command, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "dslab", version, about = "Delta shocks of damped pressureless gas dynamics")]
pub struct Cli {
    /// Command to run; falls back to `command` in the config file.
    pub command: Option<Command>,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides the config file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; overrides the config file.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Core(e) => e.fmt(f),
            CliError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Core(e) => match e.category() {
                Category::Validation => 2,
                Category::Numerical => 3,
                Category::Unsupported => 4,
            },
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Checks every block the command will use before any work starts.
pub fn validate(command: Command, config: &RunConfig) -> Result<(), CliError> {
    config.problem.validate()?;
    if let Some(t) = &config.times {
        t.validate().map_err(CliError::Config)?;
    }
    match command {
        Command::Profile => {
            if let Some(pc) = &config.profile {
                pc.validate(&config.problem)?;
            }
        }
        Command::Sweep => {
            if let Some(sc) = &config.sweep {
                sc.validate()?;
            }
        }
        Command::Fv => {
            if let Some(fc) = &config.fv {
                fc.simulation.validate()?;
                if !(fc.window_halfwidth > 0.0) {
                    return Err(CliError::Config(format!(
                        "fv.window_halfwidth must be positive (got {})",
                        fc.window_halfwidth
                    )));
                }
            }
        }
        Command::Verify => {
            if let Some(vc) = &config.verify {
                vc.quadrature.validate()?;
                if let Some(family) = &vc.test_functions {
                    for phi in family {
                        phi.validate()?;
                    }
                }
            }
        }
        Command::Solve | Command::Trajectory => {}
    }
    Ok(())
}

/// Runs one invocation and returns the summary printed on success.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let config = load_config(&cli.config)?;
    let format = cli.format.or(config.output.format).unwrap_or_default();
    let dir = cli
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let command = cli
        .command
        .or(config.command)
        .ok_or_else(|| CliError::Config("no command given on the command line or in the config".into()))?;
    validate(command, &config)?;
    let outcome = commands::run(command, &config, format)?;
    fs::create_dir_all(&dir)?;
    let mut summary = outcome.summary;
    for a in &outcome.artifacts {
        let path = dir.join(&a.name);
        fs::write(&path, &a.bytes)?;
        summary.push_str(&format!("\nwrote {}", path.display()));
    }
    Ok(summary)
}
