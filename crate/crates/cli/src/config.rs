//! `key = value` run configuration. Lines starting with `#` and text after
//! ` #` are comments. Later assignments win, so command-line overrides are
//! applied after the file.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use spamdrift::corpus::PuEncoding;
use spamdrift::driftloop::{DriftConfig, FprReference, SessionMode};
use spamdrift::features::Selector;
use spamdrift::svm::{Kernel, TrainConfig};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Enron,
    Pu,
    Ecml,
    Synth,
}

impl DatasetFormat {
    pub fn name(self) -> &'static str {
        match self {
            DatasetFormat::Enron => "enron",
            DatasetFormat::Pu => "pu",
            DatasetFormat::Ecml => "ecml",
            DatasetFormat::Synth => "synth",
        }
    }

    /// Whether the loader's document order follows delivery time.
    pub fn is_chronological(self) -> bool {
        !matches!(self, DatasetFormat::Pu)
    }
}

impl FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "enron" => Ok(DatasetFormat::Enron),
            "pu" => Ok(DatasetFormat::Pu),
            "ecml" => Ok(DatasetFormat::Ecml),
            "synth" => Ok(DatasetFormat::Synth),
            _ => Err("expected enron, pu, ecml or synth".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Linear,
    Rbf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chronology {
    /// Chronological when the format has a delivery order.
    Auto,
    Yes,
    No,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub format: DatasetFormat,
    pub pu_encoding: PuEncoding,
    /// Selector of experiment-2 runs.
    pub selector: Selector,
    /// Selectors compared in experiment-1 runs.
    pub selectors: Vec<Selector>,
    pub n: usize,
    pub rho: f64,
    pub fpr_trigger: FprReference,
    pub c: f64,
    pub kernel: KernelKind,
    pub gamma: f64,
    pub kkt_tolerance: f64,
    pub max_passes: usize,
    /// `batch` runs experiment 1, `incremental` runs experiment 2.
    pub mode: SessionMode,
    pub seed: u64,
    pub train_fraction: f64,
    pub batches: usize,
    pub chronological: Chronology,
    pub synth_vocab: usize,
    pub synth_docs_per_phase: usize,
    pub synth_overlap: f64,
    pub synth_camouflage: f64,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: None,
            manifest: None,
            format: DatasetFormat::Enron,
            pu_encoding: PuEncoding::NumericIds,
            selector: Selector::Tfdcr,
            selectors: Selector::ALL.to_vec(),
            n: 500,
            rho: 0.9,
            fpr_trigger: FprReference::PrevBatch,
            c: 1.0,
            kernel: KernelKind::Linear,
            gamma: 1.0,
            kkt_tolerance: 1e-3,
            max_passes: 5000,
            mode: SessionMode::Incremental,
            seed: 0,
            train_fraction: 1.0 / 3.0,
            batches: 10,
            chronological: Chronology::Auto,
            synth_vocab: 150,
            synth_docs_per_phase: 1000,
            synth_overlap: 0.2,
            synth_camouflage: 0.5,
            output: PathBuf::from("out"),
        }
    }
}

/// Every recognised key, in dump order.
pub const KEYS: &[&str] = &[
    "dataset",
    "manifest",
    "format",
    "pu_encoding",
    "selector",
    "selectors",
    "n",
    "rho",
    "fpr_trigger",
    "c",
    "kernel",
    "gamma",
    "kkt_tolerance",
    "max_passes",
    "mode",
    "seed",
    "train_fraction",
    "batches",
    "chronological",
    "synth_vocab",
    "synth_docs_per_phase",
    "synth_overlap",
    "synth_camouflage",
    "output",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| CliError::config(key, format!("cannot parse {value:?}: {e}")))
}

fn path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

/// Splits configuration text into `(line, key, value)` assignments.
pub fn parse_assignments(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find(" #") {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::Syntax {
            line: idx + 1,
            message: "expected `key = value`".into(),
        })?;
        out.push((idx + 1, key.trim().to_owned(), value.trim().to_owned()));
    }
    Ok(out)
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dataset" => self.dataset = path(value),
            "manifest" => self.manifest = path(value),
            "format" => self.format = parse(key, value)?,
            "pu_encoding" => {
                self.pu_encoding = match value {
                    "numeric" => PuEncoding::NumericIds,
                    "text" => PuEncoding::Text,
                    _ => return Err(CliError::config(key, "expected numeric or text")),
                }
            }
            "selector" => self.selector = parse(key, value)?,
            "selectors" => {
                self.selectors = value
                    .split(',')
                    .map(|s| parse::<Selector>(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "n" => self.n = parse(key, value)?,
            "rho" => self.rho = parse(key, value)?,
            "fpr_trigger" => self.fpr_trigger = parse(key, value)?,
            "c" => self.c = parse(key, value)?,
            "kernel" => {
                self.kernel = match value {
                    "linear" => KernelKind::Linear,
                    "rbf" => KernelKind::Rbf,
                    _ => return Err(CliError::config(key, "expected linear or rbf")),
                }
            }
            "gamma" => self.gamma = parse(key, value)?,
            "kkt_tolerance" => self.kkt_tolerance = parse(key, value)?,
            "max_passes" => self.max_passes = parse(key, value)?,
            "mode" => self.mode = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "train_fraction" => self.train_fraction = parse(key, value)?,
            "batches" => self.batches = parse(key, value)?,
            "chronological" => {
                self.chronological = match value {
                    "auto" => Chronology::Auto,
                    "true" => Chronology::Yes,
                    "false" => Chronology::No,
                    _ => return Err(CliError::config(key, "expected auto, true or false")),
                }
            }
            "synth_vocab" => self.synth_vocab = parse(key, value)?,
            "synth_docs_per_phase" => self.synth_docs_per_phase = parse(key, value)?,
            "synth_overlap" => self.synth_overlap = parse(key, value)?,
            "synth_camouflage" => self.synth_camouflage = parse(key, value)?,
            "output" => {
                self.output = path(value).ok_or_else(|| CliError::config(key, "must not be empty"))?
            }
            _ => unreachable!("keys are checked before assignment"),
        }
        Ok(())
    }

    /// Applies the file's assignments, then `overrides`, and validates.
    pub fn parse(file: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut pairs: Vec<(String, String)> = match file {
            Some(text) => parse_assignments(text)?.into_iter().map(|(_, k, v)| (k, v)).collect(),
            None => Vec::new(),
        };
        pairs.extend(overrides.iter().cloned());
        let mut unknown: Vec<String> = pairs
            .iter()
            .filter(|(k, _)| !KEYS.contains(&k.as_str()))
            .map(|(k, _)| k.clone())
            .collect();
        if !unknown.is_empty() {
            unknown.sort();
            unknown.dedup();
            return Err(CliError::UnknownKeys(unknown));
        }
        let mut config = RunConfig::default();
        for (k, v) in &pairs {
            config.set(k, v)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |key: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(CliError::config(key, format!("must lie in (0, 1), got {v}")))
            }
        };
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::config(key, format!("must be > 0, got {v}")))
            }
        };
        let at_least_one = |key: &str, v: usize| {
            if v >= 1 {
                Ok(())
            } else {
                Err(CliError::config(key, "must be >= 1"))
            }
        };
        open_unit("rho", self.rho)?;
        open_unit("train_fraction", self.train_fraction)?;
        positive("c", self.c)?;
        positive("gamma", self.gamma)?;
        positive("kkt_tolerance", self.kkt_tolerance)?;
        at_least_one("n", self.n)?;
        at_least_one("batches", self.batches)?;
        at_least_one("max_passes", self.max_passes)?;
        at_least_one("synth_vocab", self.synth_vocab)?;
        at_least_one("synth_docs_per_phase", self.synth_docs_per_phase)?;
        if !(0.0..=1.0).contains(&self.synth_overlap) {
            return Err(CliError::config("synth_overlap", format!("must lie in [0, 1], got {}", self.synth_overlap)));
        }
        if !(0.0..=1.0).contains(&self.synth_camouflage) {
            return Err(CliError::config(
                "synth_camouflage",
                format!("must lie in [0, 1], got {}", self.synth_camouflage),
            ));
        }
        if self.selectors.is_empty() {
            return Err(CliError::config("selectors", "must name at least one selector"));
        }
        if self.format != DatasetFormat::Synth && self.dataset.is_none() && self.manifest.is_none() {
            return Err(CliError::config("dataset", "a dataset path or a manifest is required"));
        }
        if self.dataset.is_some() && self.manifest.is_some() {
            return Err(CliError::config("manifest", "give either dataset or manifest, not both"));
        }
        if self.mode == SessionMode::Incremental && self.selector != Selector::Tfdcr {
            return Err(CliError::config("selector", "incremental runs need tfdcr"));
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig<f64> {
        TrainConfig {
            c: self.c,
            kernel: match self.kernel {
                KernelKind::Linear => Kernel::Linear,
                KernelKind::Rbf => Kernel::Rbf { gamma: self.gamma },
            },
            kkt_tolerance: self.kkt_tolerance,
            max_passes: self.max_passes,
            ..TrainConfig::default()
        }
    }

    pub fn drift_config(&self, selector: Selector) -> DriftConfig<f64> {
        DriftConfig {
            rho: self.rho,
            fpr_trigger: self.fpr_trigger,
            feature_dim: self.n,
            selector,
            train_config: self.train_config(),
        }
    }

    pub fn chronological_for(&self, format: DatasetFormat) -> bool {
        match self.chronological {
            Chronology::Auto => format.is_chronological(),
            Chronology::Yes => true,
            Chronology::No => false,
        }
    }

    /// Canonical text: every key in [`KEYS`] order; unset paths are omitted.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        if let Some(p) = &self.dataset {
            line("dataset", p.display().to_string());
        }
        if let Some(p) = &self.manifest {
            line("manifest", p.display().to_string());
        }
        line("format", self.format.name().into());
        line(
            "pu_encoding",
            match self.pu_encoding {
                PuEncoding::NumericIds => "numeric",
                PuEncoding::Text => "text",
            }
            .into(),
        );
        line("selector", self.selector.to_string());
        line("selectors", self.selectors.iter().map(|s| s.name()).collect::<Vec<_>>().join(","));
        line("n", self.n.to_string());
        line("rho", self.rho.to_string());
        line("fpr_trigger", self.fpr_trigger.to_string());
        line("c", self.c.to_string());
        line(
            "kernel",
            match self.kernel {
                KernelKind::Linear => "linear",
                KernelKind::Rbf => "rbf",
            }
            .into(),
        );
        line("gamma", self.gamma.to_string());
        line("kkt_tolerance", self.kkt_tolerance.to_string());
        line("max_passes", self.max_passes.to_string());
        line("mode", self.mode.to_string());
        line("seed", self.seed.to_string());
        line("train_fraction", self.train_fraction.to_string());
        line("batches", self.batches.to_string());
        line(
            "chronological",
            match self.chronological {
                Chronology::Auto => "auto",
                Chronology::Yes => "true",
                Chronology::No => "false",
            }
            .into(),
        );
        line("synth_vocab", self.synth_vocab.to_string());
        line("synth_docs_per_phase", self.synth_docs_per_phase.to_string());
        line("synth_overlap", self.synth_overlap.to_string());
        line("synth_camouflage", self.synth_camouflage.to_string());
        line("output", self.output.display().to_string());
        out
    }
}
