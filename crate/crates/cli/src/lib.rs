//! Configuration and orchestration behind the `vdw-bem` command.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, RunConfig};
pub use run::{run, CliError, Command, RunOptions};
