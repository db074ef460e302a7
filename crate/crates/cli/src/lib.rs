//! File formats, reports and the command set of the `laplace` binary.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod render;

pub use args::Cli;
pub use commands::{run, Output};
pub use error::CliError;
