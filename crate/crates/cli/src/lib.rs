//! Command-line front end: configuration, dispatch and report emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

pub use commands::{refusal_body, run_command, Command, Outcome};
pub use config::{parse_config, Overrides, RunConfig};
pub use error::{CliError, CliResult, EXIT_REFUSAL, EXIT_USAGE};
