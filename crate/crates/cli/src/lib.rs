//! `boat` command-line front end: ingest an extract once, then compute the cost
//! comparison, trend and cap documents from a CSV file or snapshot directory.
//!
//! [`run`] is the whole program; `main` only forwards its exit code.

mod args;
mod commands;
mod filter;

use std::ffi::OsString;

use clap::{error::ErrorKind, Parser};
use thiserror::Error;

pub use args::{Cli, Command, Format, MetricArg};
pub use filter::{parse_filter, parse_filters};

/// Exit status for bad flags, schemas or field references.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit status for unusable input data (header mismatch, empty cohort).
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Validation(anyhow::Error),
    #[error(transparent)]
    Data(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_VALIDATION,
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();

    match commands::execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("boat: {e:#}");
            e.exit_code()
        }
    }
}
