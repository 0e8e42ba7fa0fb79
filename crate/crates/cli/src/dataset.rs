//! Dataset loading and the manifest that binds several folders to one run.
//!
//! A manifest line is either `name path` or `name train_path test_path`;
//! `#` starts a comment line. Relative paths resolve against the manifest's
//! directory.

use std::fs;
use std::path::{Path, PathBuf};

use spamdrift::corpus::{
    load_ecml, load_enron, load_pu, partition_holdout, partition_stream, synth_drift, LabeledCorpus, Preprocessor,
    PuNaming, StreamPartition, SynthParams,
};

use crate::config::{DatasetFormat, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetSource {
    /// One corpus, split into training and test by the partition settings.
    Single(PathBuf),
    /// Separate training and test corpora.
    Split { train: PathBuf, test: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    pub source: DatasetSource,
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    let resolve = |p: &str| {
        let p = PathBuf::from(p);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };
    let mut entries: Vec<ManifestEntry> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let syntax = |message: &str| CliError::Syntax { line: idx + 1, message: message.to_owned() };
        let source = match fields[1..] {
            [one] => DatasetSource::Single(resolve(one)),
            [train, test] => DatasetSource::Split { train: resolve(train), test: resolve(test) },
            _ => return Err(syntax("expected `name path` or `name train_path test_path`")),
        };
        let name = fields[0];
        if !is_safe_name(name) {
            return Err(syntax("names may use letters, digits, '.', '-' and '_' only"));
        }
        if entries.iter().any(|e| e.name == name) {
            return Err(syntax("duplicate dataset name"));
        }
        entries.push(ManifestEntry { name: name.to_owned(), source });
    }
    if entries.is_empty() {
        return Err(CliError::config("manifest", "lists no datasets"));
    }
    Ok(entries)
}

fn is_safe_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_'))
}

fn name_from_path(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let clean: String = stem
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '_' })
        .collect();
    if clean.is_empty() {
        "dataset".into()
    } else {
        clean
    }
}

/// A named dataset, already partitioned.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub partition: StreamPartition,
    /// Files the loader could not read.
    pub skipped: usize,
}

fn load_corpus(config: &RunConfig, path: &Path) -> Result<(LabeledCorpus, usize)> {
    let pre = Preprocessor::default();
    Ok(match config.format {
        DatasetFormat::Enron => {
            let out = load_enron(path, &pre)?;
            let skipped = out.warnings();
            (out.corpus, skipped)
        }
        DatasetFormat::Pu => {
            let out = load_pu(path, &PuNaming::default(), config.pu_encoding, &pre)?;
            let skipped = out.warnings();
            (out.corpus, skipped)
        }
        DatasetFormat::Ecml => (load_ecml(path)?, 0),
        DatasetFormat::Synth => return Err(CliError::config("format", "synth corpora are generated, not loaded")),
    })
}

pub fn synth_params(config: &RunConfig) -> SynthParams {
    let mut params = SynthParams::new(config.synth_vocab, config.synth_docs_per_phase, config.synth_overlap);
    params.camouflage = config.synth_camouflage;
    params
}

fn split(config: &RunConfig, corpus: &LabeledCorpus) -> Result<StreamPartition> {
    Ok(partition_stream(
        corpus,
        config.train_fraction,
        config.batches,
        config.chronological_for(config.format),
        config.seed,
    )?)
}

/// Loads and partitions every dataset the configuration names.
pub fn load_datasets(config: &RunConfig) -> Result<Vec<Dataset>> {
    if config.format == DatasetFormat::Synth {
        let corpus = synth_drift(config.seed, &synth_params(config))?;
        return Ok(vec![Dataset { name: "synth".into(), partition: split(config, &corpus)?, skipped: 0 }]);
    }
    let entries = match (&config.dataset, &config.manifest) {
        (Some(path), _) => vec![ManifestEntry { name: name_from_path(path), source: DatasetSource::Single(path.clone()) }],
        (None, Some(manifest)) => {
            let text = fs::read_to_string(manifest).map_err(|e| CliError::io(manifest, e))?;
            parse_manifest(&text, manifest.parent().unwrap_or(Path::new(".")))?
        }
        (None, None) => return Err(CliError::config("dataset", "a dataset path or a manifest is required")),
    };
    entries
        .into_iter()
        .map(|entry| {
            let (partition, skipped) = match &entry.source {
                DatasetSource::Single(path) => {
                    let (corpus, skipped) = load_corpus(config, path)?;
                    (split(config, &corpus)?, skipped)
                }
                DatasetSource::Split { train, test } => {
                    let (train, s1) = load_corpus(config, train)?;
                    let (test, s2) = load_corpus(config, test)?;
                    (partition_holdout(&train, &test, config.batches)?, s1 + s2)
                }
            };
            Ok(Dataset { name: entry.name, partition, skipped })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lines() {
        let text = "# folders\nenron1 e1\necml /data/train.txt /data/test.txt\n\n";
        let entries = parse_manifest(text, Path::new("/base")).unwrap();
        assert_eq!(entries[0].source, DatasetSource::Single(PathBuf::from("/base/e1")));
        assert_eq!(
            entries[1].source,
            DatasetSource::Split { train: PathBuf::from("/data/train.txt"), test: PathBuf::from("/data/test.txt") }
        );
        assert!(parse_manifest("a b c d\n", Path::new(".")).is_err());
        assert!(parse_manifest("a x\na y\n", Path::new(".")).is_err());
        assert!(parse_manifest("a/b x\n", Path::new(".")).is_err());
        assert!(parse_manifest("# nothing\n", Path::new(".")).is_err());
    }

    #[test]
    fn names_from_paths() {
        assert_eq!(name_from_path(Path::new("/data/enron1")), "enron1");
        assert_eq!(name_from_path(Path::new("/data/task a.txt")), "task_a");
    }
}
