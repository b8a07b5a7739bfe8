//! Experiment runner for the `sbpcg-core` solvers: configuration, experiment drivers and file output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod runner;

pub use config::{ExperimentConfig, Settings};
pub use error::CliError;
