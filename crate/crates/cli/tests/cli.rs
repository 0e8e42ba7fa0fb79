use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spamdrift_cli::experiment::{run_experiment1_on, run_experiment2_on};
use spamdrift_cli::dataset::load_datasets;
use spamdrift_cli::{emit_report, render_table, ReportFormat, RunConfig};

fn spamdrift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spamdrift")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn small_synth(extra: &[(&str, &str)]) -> RunConfig {
    let mut overrides: Vec<(String, String)> = [
        ("format", "synth"),
        ("synth_docs_per_phase", "300"),
        ("n", "100"),
        ("seed", "5"),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    overrides.extend(extra.iter().map(|(k, v)| (k.to_string(), v.to_string())));
    RunConfig::parse(None, &overrides).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_owned()).collect()
}

fn write_doc(dir: &Path, sub: &str, name: &str, text: &str) {
    let d = dir.join(sub);
    fs::create_dir_all(&d).unwrap();
    fs::write(d.join(name), text).unwrap();
}

#[test]
fn config_dump_is_a_fixpoint() {
    let dir = tempfile::tempdir().unwrap();
    let first = stdout(&spamdrift(&["config", "dump", "--format", "synth", "--rho", "0.8", "--set", "batches=4", "--mode", "batch"]));
    assert!(first.contains("rho = 0.8"));
    assert!(first.contains("batches = 4"));
    let file = dir.path().join("run.conf");
    fs::write(&file, &first).unwrap();
    let second = stdout(&spamdrift(&["config", "dump", "--config", file.to_str().unwrap()]));
    assert_eq!(first, second);
}

#[test]
fn bad_configuration_gives_an_error_line_and_exit_code() {
    let out = spamdrift(&["config", "dump", "--set", "bogus=1", "--set", "another=2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error\tunknown-keys\t"), "{err}");
    assert!(err.contains("another, bogus"));

    let out = spamdrift(&["config", "dump", "--rho", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error\tconfig\trho:"));
}

#[test]
fn experiment_one_has_a_row_per_selector() {
    let config = small_synth(&[("mode", "batch")]);
    let experiment = run_experiment1_on(&config, &load_datasets(&config).unwrap()).unwrap();
    let csv = render_table(&experiment.table, ReportFormat::Csv);
    assert_eq!(csv.lines().count(), 7);
    assert_eq!(column(&csv, "selector"), ["tfdcr", "ig", "chi", "gini", "igr", "cfs"]);
    assert!(column(&csv, "retrains").iter().all(|r| r == "0"));
    // every row shares one partition
    let sums = column(&csv, "partition_checksum");
    assert!(sums.iter().all(|s| s == &sums[0]));
}

#[test]
fn experiment_two_recovers_from_drift() {
    let config = small_synth(&[]);
    let experiment = run_experiment2_on(&config, &load_datasets(&config).unwrap()).unwrap();
    let [batch, incremental] = &experiment.table.rows[..] else { panic!("two rows") };
    assert_eq!(batch.retrains, 0);
    assert!(incremental.retrains >= 1);
    assert!(incremental.accuracy > batch.accuracy + 0.1);
}

#[test]
fn without_drift_both_modes_agree() {
    let config = small_synth(&[("synth_overlap", "1"), ("synth_camouflage", "0")]);
    let experiment = run_experiment2_on(&config, &load_datasets(&config).unwrap()).unwrap();
    let [batch, incremental] = &experiment.table.rows[..] else { panic!("two rows") };
    assert_eq!(incremental.retrains, 0);
    assert_eq!(batch.accuracy, incremental.accuracy);
    assert_eq!(batch.mcc, incremental.mcc);
}

#[test]
fn class_exclusive_vocabulary_is_separated_by_every_selector() {
    let dir = tempfile::tempdir().unwrap();
    let spam = ["cheap pills offer", "winner prize claim", "cheap offer winner", "pills prize claim"];
    let ham = ["meeting agenda notes", "project report draft", "agenda report meeting", "draft notes project"];
    for i in 0..40 {
        write_doc(dir.path(), "spam", &format!("{:04}a.txt", i), spam[i % 4]);
        write_doc(dir.path(), "ham", &format!("{:04}b.txt", i), ham[i % 4]);
    }
    let config = RunConfig::parse(
        None,
        &[
            ("dataset".into(), dir.path().to_str().unwrap().into()),
            ("mode".into(), "batch".into()),
            ("n".into(), "10".into()),
            ("batches".into(), "4".into()),
        ],
    )
    .unwrap();
    let experiment = run_experiment1_on(&config, &load_datasets(&config).unwrap()).unwrap();
    assert_eq!(experiment.table.rows.len(), 6);
    for row in &experiment.table.rows {
        assert_eq!(row.accuracy, 1.0, "{}", row.selector);
        assert_eq!(row.mcc, 1.0, "{}", row.selector);
    }
}

#[test]
fn csv_and_json_tables_carry_the_same_values() {
    let config = small_synth(&[("mode", "batch"), ("selectors", "tfdcr")]);
    let experiment = run_experiment1_on(&config, &load_datasets(&config).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = emit_report(&experiment, &[ReportFormat::Csv, ReportFormat::Json], dir.path()).unwrap();
    assert!(written.iter().all(|p| p.exists()));

    let csv = fs::read_to_string(dir.path().join("experiment1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("experiment1.json")).unwrap()).unwrap();
    let row = &json["rows"][0];
    for key in ["accuracy", "mcc", "micro_f1", "macro_f1"] {
        let from_csv: f64 = column(&csv, key)[0].parse().unwrap();
        assert_eq!(row[key].as_f64().unwrap(), from_csv, "{key}");
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let config = small_synth(&[("mode", "batch"), ("selectors", "tfdcr")]);
    let experiment = run_experiment1_on(&config, &load_datasets(&config).unwrap()).unwrap();
    let err = emit_report(&experiment, &[ReportFormat::Csv], &blocker.join("out")).unwrap_err();
    assert_eq!(err.kind(), "io");
}

#[test]
fn run_then_report_reproduces_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let out = dir.path().join("out");
    stdout(&spamdrift(&["synth", "--output", corpus.to_str().unwrap(), "--docs-per-phase", "200", "--seed", "3"]));
    assert_eq!(fs::read_dir(corpus.join("spam")).unwrap().count() + fs::read_dir(corpus.join("ham")).unwrap().count(), 400);

    let table = stdout(&spamdrift(&[
        "run",
        "--dataset",
        corpus.to_str().unwrap(),
        "--n",
        "80",
        "--output",
        out.to_str().unwrap(),
    ]));
    assert_eq!(table, fs::read_to_string(out.join("experiment2.csv")).unwrap());
    assert!(out.join("retrains.csv").exists());
    assert_eq!(column(&table, "dataset"), ["corpus", "corpus"]);

    let mut checkpoints: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path().to_str().unwrap().to_owned())
        .filter(|p| p.ends_with(".checkpoint.json"))
        .collect();
    checkpoints.sort();
    assert_eq!(checkpoints.len(), 2);
    // sorted names put batch before incremental, the order the run wrote
    let mut args = vec!["report"];
    args.extend(checkpoints.iter().map(String::as_str));
    assert_eq!(stdout(&spamdrift(&args)), table);
}
