//! Batch front end for `iwalab-core`: module description files, the
//! subcommands behind the `iwalab` binary, and the seeded corpus generator.

pub mod commands;
mod error;
pub mod gen;
pub mod report;
pub mod spec;

pub use error::{CliError, CliResult};
