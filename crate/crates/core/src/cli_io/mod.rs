//! File formats and the `amr` command line: JSON scenarios in, CSV tables
//! and SVG plots out.

mod commands;
mod plot;
mod scenario;
mod table;

use std::path::PathBuf;

use thiserror::Error;

use crate::simulator::ConfigError;

pub use commands::{cmd_compare, cmd_run, cmd_sweep, main_with_args, Cli, Command, CompareArgs, RunArgs, SweepArgs};
pub use plot::sweep_svg;
pub use scenario::{load_scenario, parse_scenario, scenario_to_json, write_scenario};
pub use table::{format_g6, ResultsTable, COMPARE_COLUMNS, SWEEP_COLUMNS};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed scenario: {0}")]
    Scenario(String),
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// 1 for bad input of any kind, 2 for failures after the input was accepted.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Scenario(_) | CliError::Config(_) => 1,
            CliError::Write { .. } | CliError::Runtime(_) => 2,
        }
    }
}
