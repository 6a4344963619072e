//! IO layer and command implementations for the emogan pipeline: file
//! formats, model persistence, synthetic-data generation, and the CLI
//! subcommands.

pub mod commands;
pub mod config;
pub mod embed;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod report;
pub mod synth;

pub use error::{CliError, Result};
