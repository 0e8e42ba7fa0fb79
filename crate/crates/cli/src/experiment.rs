//! The two experiment drivers. Experiment 1 compares feature selectors under
//! batch training; experiment 2 pairs a batch and an incremental session on
//! the same partition.

use serde::{Deserialize, Serialize};

use spamdrift::driftloop::{Session, SessionMode, SessionReport};
use spamdrift::features::Selector;

use crate::config::RunConfig;
use crate::dataset::{load_datasets, Dataset};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub dataset: String,
    pub selector: Selector,
    pub mode: SessionMode,
    pub accuracy: f64,
    pub mcc: f64,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub avg_fpr: Option<f64>,
    pub avg_fnr: Option<f64>,
    pub retrains: usize,
    pub partition_checksum: String,
}

impl TableRow {
    pub fn new(dataset: &str, selector: Selector, report: &SessionReport<f64>) -> Self {
        TableRow {
            dataset: dataset.to_owned(),
            selector,
            mode: report.mode,
            accuracy: report.cumulative.accuracy,
            mcc: report.cumulative.mcc,
            micro_f1: report.cumulative.micro_f1,
            macro_f1: report.cumulative.macro_f1,
            avg_fpr: report.avg_fpr,
            avg_fnr: report.avg_fnr,
            retrains: report.retrains.len(),
            partition_checksum: report.partition_checksum.clone(),
        }
    }

    /// File-name stem `<dataset>_<selector>_<mode>` of the run's artifacts.
    pub fn stem(&self) -> String {
        format!("{}_{}_{}", self.dataset, self.selector, self.mode)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub experiment: u8,
    pub rows: Vec<TableRow>,
}

/// A finished session together with the names it was run under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub dataset: String,
    pub selector: Selector,
    pub session: Session<f64>,
}

impl Checkpoint {
    pub fn report(&self) -> Result<SessionReport<f64>> {
        Ok(self.session.finish()?)
    }
}

#[derive(Debug, Clone)]
pub struct SessionRun {
    pub row: TableRow,
    pub report: SessionReport<f64>,
    pub checkpoint: Checkpoint,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub table: ExperimentTable,
    pub runs: Vec<SessionRun>,
}

fn run_one(config: &RunConfig, dataset: &Dataset, selector: Selector, mode: SessionMode) -> Result<SessionRun> {
    let partition = &dataset.partition;
    let mut session = Session::start(partition, &config.drift_config(selector), mode)?;
    while session.step(partition)? {}
    let report = session.finish()?;
    let row = TableRow::new(&dataset.name, selector, &report);
    Ok(SessionRun {
        row,
        report,
        checkpoint: Checkpoint { dataset: dataset.name.clone(), selector, session },
    })
}

fn collect(experiment: u8, runs: Vec<SessionRun>) -> Experiment {
    let rows = runs.iter().map(|r| r.row.clone()).collect();
    Experiment { table: ExperimentTable { experiment, rows }, runs }
}

/// One batch session per (dataset, selector).
pub fn run_experiment1_on(config: &RunConfig, datasets: &[Dataset]) -> Result<Experiment> {
    if config.mode != SessionMode::Batch {
        return Err(CliError::config("mode", "experiment 1 runs batch sessions; set mode = batch"));
    }
    let mut runs = Vec::new();
    for dataset in datasets {
        for &selector in &config.selectors {
            runs.push(run_one(config, dataset, selector, SessionMode::Batch)?);
        }
    }
    Ok(collect(1, runs))
}

/// A batch and an incremental session per dataset, on the same partition.
pub fn run_experiment2_on(config: &RunConfig, datasets: &[Dataset]) -> Result<Experiment> {
    let mut runs = Vec::new();
    for dataset in datasets {
        for mode in [SessionMode::Batch, SessionMode::Incremental] {
            runs.push(run_one(config, dataset, config.selector, mode)?);
        }
    }
    Ok(collect(2, runs))
}

pub fn run_experiment1(config: &RunConfig) -> Result<Experiment> {
    run_experiment1_on(config, &load_datasets(config)?)
}

pub fn run_experiment2(config: &RunConfig) -> Result<Experiment> {
    run_experiment2_on(config, &load_datasets(config)?)
}

/// Experiment 1 for `mode = batch`, experiment 2 otherwise.
pub fn run_configured(config: &RunConfig) -> Result<Experiment> {
    match config.mode {
        SessionMode::Batch => run_experiment1(config),
        SessionMode::Incremental => run_experiment2(config),
    }
}
