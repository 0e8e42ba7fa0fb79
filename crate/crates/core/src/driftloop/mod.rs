//! The retraining loop. A model is trained once on the training part
//! (pass I), then test batches are classified in arrival order (pass II).
//! In incremental mode each batch is checked against the validation rules;
//! when one fires, the misclassified mail since the last retrain, the
//! documents behind the current support vectors and the violating batch are
//! merged, the feature set is refreshed from that merge, and the model is
//! retrained on it from scratch (pass III).

mod checkpoint;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Class, Document, LabeledCorpus, StreamPartition};
use crate::error::{Error, Result};
use crate::features::{count_stats, select_features, update_feature_set, vectorize, FeatureSet, Selector};
use crate::metrics::{roc_points, ConfusionMatrix, MetricsReport, RocPoint};
use crate::scalar::Scalar;
use crate::svm::{train_smo, SvmModel, TrainConfig, TrainExample};

/// Baseline the latest false-positive rate is compared against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FprReference {
    /// The batch evaluated just before.
    #[default]
    PrevBatch,
    /// The first batch evaluated after the last retrain.
    SinceRetrain,
}

impl FprReference {
    pub fn name(self) -> &'static str {
        match self {
            FprReference::PrevBatch => "prev_batch",
            FprReference::SinceRetrain => "since_retrain",
        }
    }
}

impl fmt::Display for FprReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FprReference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "prev_batch" => Ok(FprReference::PrevBatch),
            "since_retrain" => Ok(FprReference::SinceRetrain),
            other => Err(Error::invalid("fpr_trigger", format!("expected prev_batch or since_retrain, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionMode {
    /// Train once, never retrain.
    Batch,
    Incremental,
}

impl SessionMode {
    pub fn name(self) -> &'static str {
        match self {
            SessionMode::Batch => "batch",
            SessionMode::Incremental => "incremental",
        }
    }
}

impl fmt::Display for SessionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SessionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "batch" => Ok(SessionMode::Batch),
            "incremental" => Ok(SessionMode::Incremental),
            other => Err(Error::invalid("mode", format!("expected batch or incremental, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DriftConfig<F: Scalar> {
    /// Accuracy at or below this value triggers a retrain.
    pub rho: F,
    pub fpr_trigger: FprReference,
    /// Number of features kept, N.
    pub feature_dim: usize,
    /// Scoring for the initial feature set. Incremental sessions need TFDCR.
    pub selector: Selector,
    pub train_config: TrainConfig<F>,
}

impl<F: Scalar> Default for DriftConfig<F> {
    fn default() -> Self {
        DriftConfig {
            rho: F::lit(0.9),
            fpr_trigger: FprReference::PrevBatch,
            feature_dim: 500,
            selector: Selector::Tfdcr,
            train_config: TrainConfig::default(),
        }
    }
}

impl<F: Scalar> DriftConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > F::zero() && self.rho < F::one()) {
            return Err(Error::invalid("rho", format!("must lie in (0, 1), got {}", self.rho)));
        }
        if self.feature_dim == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        self.train_config.validate()
    }
}

/// Per-batch entry of the validation history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BatchStats<F: Scalar> {
    pub accuracy: F,
    /// `None` when the batch held no legitimate mail.
    pub fpr: Option<F>,
}

/// Everything the loop mutates between batches.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState<F: Scalar> {
    pub generation: usize,
    pub feature_set: FeatureSet<F>,
    pub model: SvmModel<F>,
    /// Source documents of the support vectors, in model order.
    pub sv_documents: Vec<Document>,
    /// Misclassified documents since the last retrain, with true labels.
    pub misclassified: Vec<Document>,
    /// Batches evaluated since the last retrain.
    pub batch_history: Vec<BatchStats<F>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerCause {
    AccuracyBelowRho,
    FprIncreased,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerDecision {
    pub fired: bool,
    pub cause: TriggerCause,
    pub batch_index: usize,
}

impl TriggerDecision {
    pub fn new(cause: TriggerCause, batch_index: usize) -> Self {
        TriggerDecision { fired: cause != TriggerCause::None, cause, batch_index }
    }
}

/// Predictions for one batch, in document order.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult<F: Scalar> {
    pub confusion: ConfusionMatrix,
    pub scores: Vec<F>,
    pub predictions: Vec<Class>,
    pub truths: Vec<Class>,
}

impl<F: Scalar> BatchResult<F> {
    pub fn stats(&self) -> BatchStats<F> {
        let m = MetricsReport::<F>::from_confusion(&self.confusion).expect("non-empty batch");
        BatchStats { accuracy: m.accuracy, fpr: m.fpr }
    }
}

fn class_of(doc: &Document) -> Result<Class> {
    doc.label
        .class()
        .ok_or_else(|| Error::invalid("documents", format!("{} carries no label", doc.id)))
}

/// Vectorizes `docs` under `fs` and trains a fresh model; returns the model
/// and the documents behind its support vectors.
fn train_on<F: Scalar>(
    docs: &[Document],
    fs: &FeatureSet<F>,
    config: &TrainConfig<F>,
) -> Result<(SvmModel<F>, Vec<Document>)> {
    let examples = docs
        .iter()
        .map(|d| Ok(TrainExample::new(d.id.clone(), vectorize(d, fs), class_of(d)?)))
        .collect::<Result<Vec<_>>>()?;
    let model = train_smo(&examples, config)?;
    let by_id: HashMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
    let sv_documents = model.support().iter().map(|sv| by_id[sv.id.as_str()].clone()).collect();
    Ok((model, sv_documents))
}

/// Pass I: select the initial feature set and train on `training`.
pub fn run_batch_phase<F: Scalar>(training: &LabeledCorpus, config: &DriftConfig<F>) -> Result<FilterState<F>> {
    config.validate()?;
    if !training.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let counts = count_stats(training)?;
    let feature_set = select_features(config.selector, &counts, config.feature_dim)?;
    let (model, sv_documents) = train_on(training.documents(), &feature_set, &config.train_config)?;
    Ok(FilterState {
        generation: 0,
        feature_set,
        model,
        sv_documents,
        misclassified: Vec::new(),
        batch_history: Vec::new(),
    })
}

/// Classifies `batch` with the current model. Misclassified documents come
/// back with their true labels.
pub fn evaluate_batch<F: Scalar>(state: &FilterState<F>, batch: &LabeledCorpus) -> Result<(BatchResult<F>, Vec<Document>)> {
    if batch.is_empty() {
        return Err(Error::invalid("batch", "is empty"));
    }
    let mut result = BatchResult {
        confusion: ConfusionMatrix::default(),
        scores: Vec::with_capacity(batch.len()),
        predictions: Vec::with_capacity(batch.len()),
        truths: Vec::with_capacity(batch.len()),
    };
    let mut misclassified = Vec::new();
    for doc in batch.documents() {
        let truth = class_of(doc)?;
        let p = state.model.predict(&vectorize(doc, &state.feature_set))?;
        result.confusion.record(p.label, truth);
        result.scores.push(p.score);
        result.predictions.push(p.label);
        result.truths.push(truth);
        if p.label != truth {
            misclassified.push(doc.clone());
        }
    }
    Ok((result, misclassified))
}

/// Applies the validation rules to the batches seen since the last retrain,
/// latest last. A low accuracy wins over an FPR increase.
pub fn check_validation<F: Scalar>(history: &[BatchStats<F>], config: &DriftConfig<F>, batch_index: usize) -> TriggerDecision {
    let Some(latest) = history.last() else {
        return TriggerDecision::new(TriggerCause::None, batch_index);
    };
    if latest.accuracy <= config.rho {
        return TriggerDecision::new(TriggerCause::AccuracyBelowRho, batch_index);
    }
    let reference = match (config.fpr_trigger, history.len()) {
        (_, 0 | 1) => None,
        (FprReference::PrevBatch, len) => history[len - 2].fpr,
        (FprReference::SinceRetrain, _) => history[0].fpr,
    };
    match (latest.fpr, reference) {
        (Some(now), Some(before)) if now > before => TriggerDecision::new(TriggerCause::FprIncreased, batch_index),
        _ => TriggerDecision::new(TriggerCause::None, batch_index),
    }
}

/// Result of pass III.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrainOutcome<F: Scalar> {
    pub state: FilterState<F>,
    pub retrain_set_size: usize,
    pub replaced: usize,
    pub added: Vec<String>,
    pub removed: Vec<String>,
}

/// Pass III: builds the retraining set, refreshes the feature set over it
/// and retrains. Fails with [`Error::DegenerateRetrainSet`] when the
/// retraining set holds a single class.
pub fn incremental_retrain<F: Scalar>(
    state: &FilterState<F>,
    trigger: &TriggerDecision,
    violating_batch: &LabeledCorpus,
    config: &DriftConfig<F>,
) -> Result<RetrainOutcome<F>> {
    if !trigger.fired {
        return Err(Error::invalid("trigger", "retraining requires a fired trigger"));
    }
    let mut merged: BTreeMap<&str, &Document> = BTreeMap::new();
    for d in state.misclassified.iter().chain(&state.sv_documents).chain(violating_batch.documents()) {
        merged.entry(d.id.as_str()).or_insert(d);
    }
    let rtrem = LabeledCorpus::new(merged.into_values().cloned().collect())?;
    if !rtrem.has_both_classes() {
        return Err(Error::DegenerateRetrainSet { generation: state.generation + 1 });
    }
    let update = update_feature_set(&state.feature_set, &rtrem, config.feature_dim)?;
    let (model, sv_documents) = train_on(rtrem.documents(), &update.feature_set, &config.train_config)?;
    Ok(RetrainOutcome {
        state: FilterState {
            generation: state.generation + 1,
            feature_set: update.feature_set,
            model,
            sv_documents,
            misclassified: Vec::new(),
            batch_history: Vec::new(),
        },
        retrain_set_size: rtrem.len(),
        replaced: update.replaced,
        added: update.added,
        removed: update.removed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BatchRecord<F: Scalar> {
    pub index: usize,
    /// Generation of the model that classified the batch.
    pub generation: usize,
    pub size: usize,
    pub first_arrival: usize,
    pub last_arrival: usize,
    pub metrics: MetricsReport<F>,
    pub trigger: TriggerCause,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RetrainEvent<F: Scalar> {
    pub batch_index: usize,
    pub cause: TriggerCause,
    /// Generation produced by this retrain.
    pub generation: usize,
    pub replaced: usize,
    pub added: Vec<String>,
    pub removed: Vec<String>,
    pub retrain_set_size: usize,
    pub prev_support_vectors: usize,
    pub prev_misclassified: usize,
    pub batch_size: usize,
    /// Training documents plus every test document up to this batch.
    pub documents_seen: usize,
    pub support_vectors: usize,
    pub feature_dim: usize,
    /// Violating batch accuracy under the old and the new model.
    pub accuracy_before: F,
    pub accuracy_after: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SessionReport<F: Scalar> {
    pub mode: SessionMode,
    pub partition_checksum: String,
    pub training_size: usize,
    pub feature_dim: usize,
    pub batches: Vec<BatchRecord<F>>,
    pub retrains: Vec<RetrainEvent<F>>,
    /// Metrics over every evaluated test document.
    pub cumulative: MetricsReport<F>,
    /// Means of the per-batch rates that are defined.
    pub avg_fpr: Option<F>,
    pub avg_fnr: Option<F>,
    /// Empty when the evaluated documents hold a single class.
    pub roc: Vec<RocPoint<F>>,
    pub final_generation: usize,
    /// Why the session stopped before the last batch, if it did.
    pub halted: Option<String>,
}

/// A session in progress. Serializable, so a run can stop after any batch
/// and resume later with the same partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Session<F: Scalar> {
    pub mode: SessionMode,
    pub config: DriftConfig<F>,
    pub partition_checksum: String,
    pub training_size: usize,
    pub state: FilterState<F>,
    pub next_batch: usize,
    pub documents_seen: usize,
    pub batches: Vec<BatchRecord<F>>,
    pub retrains: Vec<RetrainEvent<F>>,
    pub scores: Vec<F>,
    pub truths: Vec<Class>,
    pub halted: Option<String>,
}

impl<F: Scalar> Session<F> {
    /// Runs pass I.
    pub fn start(partition: &StreamPartition, config: &DriftConfig<F>, mode: SessionMode) -> Result<Self> {
        if mode == SessionMode::Incremental && config.selector != Selector::Tfdcr {
            return Err(Error::invalid("selector", "incremental sessions update features by TFDCR and need the tfdcr selector"));
        }
        let state = run_batch_phase(&partition.training, config)?;
        Ok(Session {
            mode,
            config: config.clone(),
            partition_checksum: partition.checksum(),
            training_size: partition.training.len(),
            state,
            next_batch: 0,
            documents_seen: partition.training.len(),
            batches: Vec::new(),
            retrains: Vec::new(),
            scores: Vec::new(),
            truths: Vec::new(),
            halted: None,
        })
    }

    pub fn is_finished(&self, partition: &StreamPartition) -> bool {
        self.halted.is_some() || self.next_batch >= partition.test_batches.len()
    }

    /// Processes the next batch. Returns `false` once nothing is left.
    pub fn step(&mut self, partition: &StreamPartition) -> Result<bool> {
        if partition.checksum() != self.partition_checksum {
            return Err(Error::invalid("partition", "differs from the one the session started with"));
        }
        if self.is_finished(partition) {
            return Ok(false);
        }
        let k = self.next_batch;
        let batch = &partition.test_batches[k];
        let (result, misclassified) = evaluate_batch(&self.state, batch)?;
        self.documents_seen += batch.len();
        self.scores.extend_from_slice(&result.scores);
        self.truths.extend_from_slice(&result.truths);

        let mut decision = TriggerDecision::new(TriggerCause::None, k);
        if self.mode == SessionMode::Incremental {
            self.state.batch_history.push(result.stats());
            decision = check_validation(&self.state.batch_history, &self.config, k);
        }
        let docs = batch.documents();
        self.batches.push(BatchRecord {
            index: k,
            generation: self.state.generation,
            size: batch.len(),
            first_arrival: docs[0].arrival_index,
            last_arrival: docs[docs.len() - 1].arrival_index,
            metrics: MetricsReport::from_confusion(&result.confusion)?,
            trigger: decision.cause,
        });
        self.next_batch += 1;

        if !decision.fired {
            if self.mode == SessionMode::Incremental {
                self.state.misclassified.extend(misclassified);
            }
            return Ok(true);
        }
        match incremental_retrain(&self.state, &decision, batch, &self.config) {
            Ok(outcome) => {
                let (after, _) = evaluate_batch(&outcome.state, batch)?;
                self.retrains.push(RetrainEvent {
                    batch_index: k,
                    cause: decision.cause,
                    generation: outcome.state.generation,
                    replaced: outcome.replaced,
                    added: outcome.added,
                    removed: outcome.removed,
                    retrain_set_size: outcome.retrain_set_size,
                    prev_support_vectors: self.state.sv_documents.len(),
                    prev_misclassified: self.state.misclassified.len(),
                    batch_size: batch.len(),
                    documents_seen: self.documents_seen,
                    support_vectors: outcome.state.sv_documents.len(),
                    feature_dim: outcome.state.feature_set.len(),
                    accuracy_before: result.stats().accuracy,
                    accuracy_after: after.stats().accuracy,
                });
                self.state = outcome.state;
                Ok(true)
            }
            Err(Error::DegenerateRetrainSet { generation }) => {
                self.halted = Some(format!(
                    "retraining set for generation {generation} after batch {k} holds a single class"
                ));
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }

    pub fn finish(&self) -> Result<SessionReport<F>> {
        let confusion = self
            .batches
            .iter()
            .fold(ConfusionMatrix::default(), |acc, b| acc + b.metrics.confusion);
        let mean = |values: Vec<F>| {
            (!values.is_empty()).then(|| values.iter().copied().sum::<F>() / F::from_count(values.len()))
        };
        let roc = match roc_points(&self.scores, &self.truths) {
            Ok(points) => points,
            Err(Error::SingleClass) => Vec::new(),
            Err(e) => return Err(e),
        };
        Ok(SessionReport {
            mode: self.mode,
            partition_checksum: self.partition_checksum.clone(),
            training_size: self.training_size,
            feature_dim: self.config.feature_dim,
            batches: self.batches.clone(),
            retrains: self.retrains.clone(),
            cumulative: MetricsReport::from_confusion(&confusion)?,
            avg_fpr: mean(self.batches.iter().filter_map(|b| b.metrics.fpr).collect()),
            avg_fnr: mean(self.batches.iter().filter_map(|b| b.metrics.fnr).collect()),
            roc,
            final_generation: self.state.generation,
            halted: self.halted.clone(),
        })
    }
}

/// Runs a whole session: pass I, then every test batch in order.
pub fn run_session<F: Scalar>(partition: &StreamPartition, config: &DriftConfig<F>, mode: SessionMode) -> Result<SessionReport<F>> {
    let mut session = Session::start(partition, config, mode)?;
    while session.step(partition)? {}
    session.finish()
}

#[cfg(test)]
mod tests;
