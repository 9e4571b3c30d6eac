//! Front end for the `issgain` binary: configuration, command dispatch and
//! file emission.

pub mod commands;
pub mod config;
pub mod plot;

pub use commands::{dispatch, CliError, Command};
pub use config::{parse_config, ConfigError, RunConfig};
