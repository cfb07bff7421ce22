//! Command-line front end and experiment harness.

pub mod cli;
pub mod commands;
pub mod output;
pub mod stats;

pub use cli::Cli;
pub use commands::{run, Outcome};
