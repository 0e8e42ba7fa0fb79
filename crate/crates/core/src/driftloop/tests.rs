use super::*;
use crate::corpus::{partition_stream, synth_drift, Label, SynthParams};

fn doc(id: &str, label: Label, text: &str, arrival: usize) -> Document {
    Document::new(id, label, text.split_whitespace().map(str::to_owned).collect(), arrival)
}

fn stats(accuracy: f64, fpr: f64) -> BatchStats<f64> {
    BatchStats { accuracy, fpr: Some(fpr) }
}

fn drift_partition(overlap: f64, seed: u64) -> StreamPartition {
    let corpus = synth_drift(seed, &SynthParams::new(150, 300, overlap)).unwrap();
    partition_stream(&corpus, 1.0 / 3.0, 10, true, seed).unwrap()
}

fn config() -> DriftConfig<f64> {
    DriftConfig { feature_dim: 100, ..DriftConfig::default() }
}

#[test]
fn accuracy_rule() {
    let cfg = config();
    let d = check_validation(&[stats(0.95, 0.0), stats(0.89, 0.0)], &cfg, 1);
    assert_eq!(d, TriggerDecision { fired: true, cause: TriggerCause::AccuracyBelowRho, batch_index: 1 });
    // at the threshold counts as a violation
    assert!(check_validation(&[stats(0.9, 0.0)], &cfg, 0).fired);
    assert!(!check_validation(&[stats(0.95, 0.1)], &cfg, 0).fired);
    assert!(!check_validation::<f64>(&[], &cfg, 0).fired);
}

#[test]
fn fpr_rule() {
    let cfg = config();
    let d = check_validation(&[stats(0.97, 0.02), stats(0.96, 0.05)], &cfg, 1);
    assert_eq!(d.cause, TriggerCause::FprIncreased);
    assert!(!check_validation(&[stats(0.97, 0.05), stats(0.96, 0.05)], &cfg, 1).fired);
    // both rules hold: accuracy wins
    let d = check_validation(&[stats(0.97, 0.02), stats(0.5, 0.3)], &cfg, 1);
    assert_eq!(d.cause, TriggerCause::AccuracyBelowRho);
    // an undefined rate never fires
    let none = BatchStats { accuracy: 0.99, fpr: None };
    assert!(!check_validation(&[stats(0.97, 0.02), none], &cfg, 1).fired);
}

#[test]
fn fpr_reference_modes() {
    let history = [stats(0.99, 0.01), stats(0.99, 0.04), stats(0.99, 0.03)];
    let prev = config();
    assert!(!check_validation(&history, &prev, 2).fired);
    let since = DriftConfig { fpr_trigger: FprReference::SinceRetrain, ..config() };
    assert_eq!(check_validation(&history, &since, 2).cause, TriggerCause::FprIncreased);
    assert!(!check_validation(&history[..1], &since, 0).fired);
    assert_eq!("since_retrain".parse::<FprReference>().unwrap(), FprReference::SinceRetrain);
    assert!("sometimes".parse::<FprReference>().is_err());
}

#[test]
fn config_validation() {
    assert!(config().validate().is_ok());
    for rho in [0.0, 1.0, -0.5, f64::NAN] {
        assert!(DriftConfig { rho, ..config() }.validate().is_err());
    }
    assert!(DriftConfig { feature_dim: 0, ..config() }.validate().is_err());
}

#[test]
fn two_document_training() {
    let training = LabeledCorpus::new(vec![
        doc("s", Label::Spam, "cheap pills cheap", 0),
        doc("l", Label::Legitimate, "meeting agenda notes", 1),
    ])
    .unwrap();
    let state = run_batch_phase(&training, &config()).unwrap();
    assert_eq!(state.generation, 0);
    assert!(state.model.sv_count() <= 2);
    assert_eq!(state.sv_documents.len(), state.model.sv_count());
    // a document with no selected term scores the bias alone
    let batch = LabeledCorpus::new(vec![doc("u", Label::Spam, "unrelated words", 5)]).unwrap();
    let (res, _) = evaluate_batch(&state, &batch).unwrap();
    assert_eq!(res.scores[0], state.model.bias());
    assert_eq!(res.predictions[0], Prediction::from_score(state.model.bias()).label);

    let single = LabeledCorpus::new(vec![doc("s", Label::Spam, "x y", 0)]).unwrap();
    assert!(matches!(run_batch_phase(&single, &config()), Err(Error::SingleClass)));
}

use crate::svm::Prediction;

#[test]
fn phase_one_holdout_beats_rho() {
    let part = drift_partition(0.2, 9);
    let state = run_batch_phase(&part.training, &config()).unwrap();
    // the first batches precede the drift point
    for batch in &part.test_batches[..2] {
        assert!(batch.documents().last().unwrap().arrival_index < 300);
        let (res, _) = evaluate_batch(&state, batch).unwrap();
        assert!(res.stats().accuracy > 0.9);
    }
}

#[test]
fn training_documents_are_classified_correctly() {
    let part = drift_partition(1.0, 4);
    let state = run_batch_phase(&part.training, &config()).unwrap();
    let (res, mis) = evaluate_batch(&state, &part.training).unwrap();
    assert!(mis.is_empty());
    assert_eq!(res.confusion.errors(), 0);
}

#[test]
fn flipped_batch_inverts_errors() {
    let part = drift_partition(0.2, 5);
    let state = run_batch_phase(&part.training, &config()).unwrap();
    let batch = &part.test_batches[4];
    let (_, before) = evaluate_batch(&state, batch).unwrap();
    let flipped: Vec<Document> = batch
        .documents()
        .iter()
        .map(|d| {
            let mut d = d.clone();
            d.label = d.label.class().unwrap().flipped().into();
            d
        })
        .collect();
    let (_, after) = evaluate_batch(&state, &LabeledCorpus::new(flipped).unwrap()).unwrap();
    assert_eq!(after.len(), batch.len() - before.len());
    assert!(after.iter().all(|d| d.label.class().is_some()));
}

#[test]
fn evaluate_rejects_empty_and_unlabeled() {
    let part = drift_partition(1.0, 4);
    let state = run_batch_phase(&part.training, &config()).unwrap();
    assert!(evaluate_batch(&state, &LabeledCorpus::new(Vec::new()).unwrap()).is_err());
    let unlabeled = LabeledCorpus::new(vec![doc("u", Label::Unlabeled, "a b", 0)]).unwrap();
    assert!(evaluate_batch(&state, &unlabeled).is_err());
}

#[test]
fn retrain_with_empty_mcm() {
    let part = drift_partition(0.2, 6);
    let cfg = config();
    let state = run_batch_phase(&part.training, &cfg).unwrap();
    assert!(state.misclassified.is_empty());
    let batch = &part.test_batches[6];
    let fired = TriggerDecision::new(TriggerCause::AccuracyBelowRho, 6);
    let out = incremental_retrain(&state, &fired, batch, &cfg).unwrap();
    let mut ids: Vec<&str> = state.sv_documents.iter().chain(batch.documents()).map(|d| d.id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(out.retrain_set_size, ids.len());
    assert_eq!(out.state.generation, 1);
    assert_eq!(out.state.feature_set.len(), state.feature_set.len());
    assert_eq!(out.replaced, out.added.len());
    assert_eq!(out.replaced, out.removed.len());
    // support vectors come from the retraining set
    assert!(out.state.sv_documents.iter().all(|d| ids.binary_search(&d.id.as_str()).is_ok()));
    let (before, _) = evaluate_batch(&state, batch).unwrap();
    let (after, _) = evaluate_batch(&out.state, batch).unwrap();
    assert!(after.stats().accuracy > before.stats().accuracy);

    let unfired = TriggerDecision::new(TriggerCause::None, 6);
    assert!(incremental_retrain(&state, &unfired, batch, &cfg).is_err());
}

#[test]
fn duplicates_collapse_in_retraining_set() {
    let part = drift_partition(0.2, 6);
    let cfg = config();
    let mut state = run_batch_phase(&part.training, &cfg).unwrap();
    let batch = &part.test_batches[6];
    state.misclassified = batch.documents()[..10].to_vec();
    let fired = TriggerDecision::new(TriggerCause::FprIncreased, 6);
    let out = incremental_retrain(&state, &fired, batch, &cfg).unwrap();
    assert!(out.retrain_set_size <= state.sv_documents.len() + batch.len());
    assert!(out.state.misclassified.is_empty() && out.state.batch_history.is_empty());
}

#[test]
fn single_class_retraining_set_is_reported() {
    let training = LabeledCorpus::new(vec![
        doc("s", Label::Spam, "cheap pills", 0),
        doc("l", Label::Legitimate, "agenda notes", 1),
    ])
    .unwrap();
    let cfg = config();
    let mut state = run_batch_phase(&training, &cfg).unwrap();
    state.sv_documents.retain(|d| d.label == Label::Spam);
    let batch = LabeledCorpus::new(vec![doc("t", Label::Spam, "pills now", 2)]).unwrap();
    let fired = TriggerDecision::new(TriggerCause::AccuracyBelowRho, 0);
    let err = incremental_retrain(&state, &fired, &batch, &cfg).unwrap_err();
    assert!(matches!(err, Error::DegenerateRetrainSet { generation: 1 }));
}

#[test]
fn session_halts_on_single_class_retraining_set() {
    let training = LabeledCorpus::new(vec![
        doc("s", Label::Spam, "cheap pills", 0),
        doc("l", Label::Legitimate, "agenda notes", 1),
    ])
    .unwrap();
    // spam written in legitimate words: the prediction is wrong
    let batch = |i: usize| LabeledCorpus::new(vec![doc(&format!("t{i}"), Label::Spam, "agenda notes", i)]).unwrap();
    let part = StreamPartition { training, test_batches: vec![batch(2), batch(3)] };
    let cfg = DriftConfig { feature_dim: 4, ..config() };
    let mut session = Session::start(&part, &cfg, SessionMode::Incremental).unwrap();
    // support vectors always span both classes, so force a one-class set
    session.state.sv_documents.retain(|d| d.label == Label::Spam);
    assert!(!session.step(&part).unwrap());
    assert!(session.halted.as_deref().unwrap().contains("single class"));
    assert!(!session.step(&part).unwrap());
    let report = session.finish().unwrap();
    assert_eq!(report.batches.len(), 1);
    assert!(report.retrains.is_empty());
    assert!(report.roc.is_empty());
}

#[test]
fn batch_mode_never_retrains_and_ignores_rho() {
    let part = drift_partition(0.2, 2);
    let a = run_session(&part, &config(), SessionMode::Batch).unwrap();
    let b = run_session(&part, &DriftConfig { rho: 0.999, ..config() }, SessionMode::Batch).unwrap();
    assert!(a.retrains.is_empty());
    assert_eq!(a.batches, b.batches);
    assert_eq!(a.cumulative, b.cumulative);
    assert!(a.batches.iter().all(|r| r.trigger == TriggerCause::None && r.generation == 0));
}

#[test]
fn no_drift_means_no_retrain() {
    let part = drift_partition(1.0, 3);
    let batch = run_session(&part, &config(), SessionMode::Batch).unwrap();
    assert!(batch.batches.iter().all(|b| b.metrics.accuracy > 0.9));
    let inc = run_session(&part, &config(), SessionMode::Incremental).unwrap();
    assert!(inc.retrains.is_empty());
    assert_eq!(batch.batches, inc.batches);
    assert_eq!(batch.cumulative, inc.cumulative);
    assert_eq!(batch.roc, inc.roc);
}

#[test]
fn drift_session_recovers() {
    let part = drift_partition(0.2, 11);
    let batch = run_session(&part, &config(), SessionMode::Batch).unwrap();
    let inc = run_session(&part, &config(), SessionMode::Incremental).unwrap();
    assert!(!inc.retrains.is_empty());
    assert!(inc.cumulative.accuracy > batch.cumulative.accuracy);
    let mut seen = part.training.len();
    let mut prev_batch = None;
    for e in &inc.retrains {
        assert_eq!(e.feature_dim, config().feature_dim);
        assert_eq!(e.added.len(), e.replaced);
        assert_eq!(e.removed.len(), e.replaced);
        assert!(e.retrain_set_size <= e.prev_support_vectors + e.prev_misclassified + e.batch_size);
        assert!(e.retrain_set_size < e.documents_seen);
        assert!(e.accuracy_after > e.accuracy_before);
        assert!(prev_batch.is_none_or(|p| p < e.batch_index));
        prev_batch = Some(e.batch_index);
        seen = seen.max(e.documents_seen);
    }
    assert!(seen <= part.training.len() + part.test_len());
    assert!(inc.batches.len() == part.test_batches.len() && inc.halted.is_none());
}

#[test]
fn incremental_needs_tfdcr() {
    let part = drift_partition(0.2, 2);
    let cfg = DriftConfig { selector: Selector::Chi, ..config() };
    assert!(run_session(&part, &cfg, SessionMode::Incremental).is_err());
    assert!(run_session(&part, &cfg, SessionMode::Batch).is_ok());
}

#[test]
fn state_text_round_trip() {
    let part = drift_partition(0.2, 8);
    let cfg = config();
    let mut session = Session::start(&part, &cfg, SessionMode::Incremental).unwrap();
    for _ in 0..6 {
        session.step(&part).unwrap();
    }
    let text = session.state.to_text().unwrap();
    let back = FilterState::<f64>::from_text(&text).unwrap();
    assert_eq!(back.to_text().unwrap(), text);
    assert_eq!(back.feature_set, session.state.feature_set);
    assert_eq!(back.sv_documents, session.state.sv_documents);
    assert_eq!(back.batch_history, session.state.batch_history);
    assert!(FilterState::<f64>::from_text(&text.replace("generation", "gen")).is_err());
    assert!(FilterState::<f64>::from_text(&text[..text.len() / 2]).is_err());
}

#[test]
fn resumed_session_matches_uninterrupted_run() {
    let part = drift_partition(0.2, 12);
    let cfg = config();
    let whole = run_session(&part, &cfg, SessionMode::Incremental).unwrap();
    let mut session = Session::start(&part, &cfg, SessionMode::Incremental).unwrap();
    for _ in 0..4 {
        session.step(&part).unwrap();
    }
    let state = FilterState::from_text(&session.state.to_text().unwrap()).unwrap();
    let mut resumed = Session { state, ..session };
    while resumed.step(&part).unwrap() {}
    let report = resumed.finish().unwrap();
    assert_eq!(report.batches, whole.batches);
    assert_eq!(report.retrains, whole.retrains);
    assert_eq!(report.cumulative, whole.cumulative);

    let other = drift_partition(0.2, 13);
    let mut fresh = Session::start(&part, &cfg, SessionMode::Incremental).unwrap();
    assert!(fresh.step(&other).is_err());
}

#[test]
fn sessions_are_deterministic() {
    let part = drift_partition(0.2, 14);
    let a = run_session(&part, &config(), SessionMode::Incremental).unwrap();
    let b = run_session(&part, &config(), SessionMode::Incremental).unwrap();
    assert_eq!(a, b);
    let sa = run_batch_phase(&part.training, &config()).unwrap();
    let sb = run_batch_phase(&part.training, &config()).unwrap();
    assert_eq!(sa.to_text().unwrap(), sb.to_text().unwrap());
}
