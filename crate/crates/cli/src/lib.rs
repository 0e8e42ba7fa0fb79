//! Configuration, experiment drivers and report emission behind the
//! `spamdrift` command.

pub mod config;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod report;

pub use config::{DatasetFormat, RunConfig};
pub use error::{CliError, Result};
pub use experiment::{run_configured, run_experiment1, run_experiment2, Checkpoint, Experiment, ExperimentTable, TableRow};
pub use report::{emit_report, render_table, ReportFormat};
