//! Command-line layer over `fowt-core`: configuration files, input signal
//! synthesis, CSV output and the subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod params;
pub mod signals;

pub use config::RunConfig;
pub use error::{Error, Result};

/// Version string written into every output header.
pub const TOOL_VERSION: &str = concat!("fowt ", env!("CARGO_PKG_VERSION"));
