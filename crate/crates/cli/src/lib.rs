//! Library half of the `heavyeig` command-line tool: configuration loading,
//! the four subcommands, and the CSV/manifest writers.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

pub use error::{CliError, CliResult};
