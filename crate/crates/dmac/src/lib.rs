//! File formats, plot-data tables and the command-line front end for
//! `dmac-core`.

pub mod cli;
pub mod commands;
mod error;
pub mod format;
pub mod table;

pub use error::CliError;
