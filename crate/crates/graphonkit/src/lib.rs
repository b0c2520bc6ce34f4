//! File formats and the command-line interface over `graphonkit-core`.

pub mod cli;
pub mod error;
pub mod io;

pub use error::CliError;
