//! Config parsing, presets and the experiment runner behind the `seqent`
//! binary.

pub mod config;
pub mod error;
pub mod presets;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use runner::{run_experiment, OutputFormat, ResultEnvelope};
