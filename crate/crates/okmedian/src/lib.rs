//! File formats, benchmark suites and the command-line driver around
//! [`okmedian_core`].

pub mod audit;
pub mod error;
pub mod format;
pub mod report;
pub mod solve;
pub mod suites;

pub use error::{CliError, CliResult};
