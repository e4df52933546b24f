//! Command-line front end: argument parsing, configuration layering,
//! output writers and the four subcommands.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

pub use args::Cli;
pub use commands::{cmd_diagnose, cmd_peak, cmd_synth, cmd_trends};
pub use config::RunConfig;
pub use error::CliError;

use args::Command;

/// Runs one parsed invocation and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    match &cli.command {
        Command::Trends(a) => cmd_trends(&RunConfig::resolve(&a.common, &a.inputs, (None, None))?),
        Command::Peak(a) => cmd_peak(&RunConfig::resolve(&a.common, &a.inputs, (a.from, a.to))?),
        Command::Synth(a) => cmd_synth(a),
        Command::Diagnose(a) => cmd_diagnose(&RunConfig::resolve(&a.common, &[], (None, None))?, a),
    }
}

#[cfg(test)]
mod tests;
