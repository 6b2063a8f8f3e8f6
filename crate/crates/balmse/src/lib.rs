//! Files, configuration and subcommands for the `balmse` binary.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod output;

pub use config::RunConfig;
pub use error::{CliError, Result};
