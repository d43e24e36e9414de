//! Command-line front end for the `mcpcheck` certification suites.

pub mod config;
pub mod run;
pub mod svg;

pub use config::{CheckKind, ConfigError, Overrides, RunConfig};
pub use run::{run_all, run_check, summary, write_outputs, RunReport, SCHEMA_VERSION};
