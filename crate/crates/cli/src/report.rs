//! Report files. Floats are printed as the shortest decimal that parses back
//! to the same value; absent rates are empty CSV cells and JSON nulls.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use spamdrift::metrics::roc_tsv;

use crate::experiment::{Experiment, ExperimentTable};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err("expected csv or json".into()),
        }
    }
}

pub const TABLE_HEADER: &str = "dataset,selector,mode,accuracy,mcc,micro_f1,macro_f1,avg_fpr,avg_fnr,retrains,partition_checksum";

pub const RETRAIN_HEADER: &str = "dataset,selector,batch_index,cause,generation,replaced,retrain_set_size,prev_support_vectors,prev_misclassified,batch_size,documents_seen,support_vectors,accuracy_before,accuracy_after";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn table_csv(table: &ExperimentTable) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.selector,
            r.mode,
            r.accuracy,
            r.mcc,
            r.micro_f1,
            r.macro_f1,
            opt(r.avg_fpr),
            opt(r.avg_fnr),
            r.retrains,
            r.partition_checksum
        );
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report values serialize");
    text.push('\n');
    text
}

pub fn render_table(table: &ExperimentTable, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => table_csv(table),
        ReportFormat::Json => to_json(table),
    }
}

/// Retrain events of every incremental session.
pub fn retrains_csv(experiment: &Experiment) -> String {
    let mut out = String::from(RETRAIN_HEADER);
    out.push('\n');
    for run in &experiment.runs {
        for e in &run.report.retrains {
            let cause = serde_json::to_value(e.cause).expect("enum serializes");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                run.row.dataset,
                run.row.selector,
                e.batch_index,
                cause.as_str().unwrap_or_default(),
                e.generation,
                e.replaced,
                e.retrain_set_size,
                e.prev_support_vectors,
                e.prev_misclassified,
                e.batch_size,
                e.documents_seen,
                e.support_vectors,
                e.accuracy_before,
                e.accuracy_after
            );
        }
    }
    out
}

fn write(dir: &Path, name: &str, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes the table in each requested format plus per-session artifacts:
/// ROC points, the session report, a resumable checkpoint and the final
/// model dump. Returns the paths written, in order.
pub fn emit_report(experiment: &Experiment, formats: &[ReportFormat], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let base = format!("experiment{}", experiment.table.experiment);
    for &format in formats {
        let ext = match format {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        };
        write(dir, &format!("{base}.{ext}"), &render_table(&experiment.table, format), &mut written)?;
    }
    if experiment.table.experiment == 2 {
        write(dir, "retrains.csv", &retrains_csv(experiment), &mut written)?;
    }
    for run in &experiment.runs {
        let stem = run.row.stem();
        write(dir, &format!("{stem}.roc.tsv"), &roc_tsv(&run.report.roc), &mut written)?;
        write(dir, &format!("{stem}.session.json"), &to_json(&run.report), &mut written)?;
        write(dir, &format!("{stem}.checkpoint.json"), &to_json(&run.checkpoint), &mut written)?;
        write(dir, &format!("{stem}.model.txt"), &run.checkpoint.session.state.model.to_text()?, &mut written)?;
    }
    Ok(written)
}
