mod evolve;
mod resolvent;
mod semilinear;
mod verify;

use std::fmt;

use crate::config::{Config, ConfigError};
use crate::report::{OutDir, Report};

pub use evolve::evolve;
pub use resolvent::resolvent;
pub use semilinear::{equilibrium, flow, sweep};
pub use verify::{verify, Suite};

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Config(ConfigError),
    /// Exit code 1.
    Run(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "invalid config: {e}"),
            CliError::Run(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<asympheat::Error> for CliError {
    fn from(e: asympheat::Error) -> Self {
        match e {
            asympheat::Error::GridTooCoarse { .. } => CliError::Config(ConfigError::new("grid.spacing", e.to_string())),
            other => CliError::Run(other.to_string()),
        }
    }
}

/// Everything a subcommand needs.
pub struct Run<'a> {
    pub config: &'a Config,
    pub seed: u64,
    pub out: &'a OutDir,
    pub report: &'a mut Report,
}

pub type CmdResult = Result<(), CliError>;
