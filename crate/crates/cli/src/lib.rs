//! Batch runner for the `zitter` simulator: configuration, orchestration and
//! output artefacts.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod report;
pub mod run;
pub mod svg;

pub use config::{RunConfig, Scenario};
pub use error::CliError;
pub use run::{run, ConfigSource, RunOptions, RunOutcome};
