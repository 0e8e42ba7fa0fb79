use spamdrift::corpus::{
    dump_enron_layout, load_enron, partition_stream, synth_drift, Preprocessor, StopList, SynthParams,
};
use spamdrift::driftloop::{run_session, DriftConfig, SessionMode};
use spamdrift::features::Selector;

fn drifting_corpus() -> spamdrift::corpus::LabeledCorpus {
    synth_drift(11, &SynthParams::new(150, 300, 0.2)).unwrap()
}

#[test]
fn enron_layout_round_trips_through_the_loader() {
    let corpus = drifting_corpus();
    let dir = tempfile::tempdir().unwrap();
    dump_enron_layout(&corpus, dir.path()).unwrap();

    let pre = Preprocessor::new(StopList::from_words(Vec::<String>::new()));
    let loaded = load_enron(dir.path(), &pre).unwrap();
    assert_eq!(loaded.warnings(), 0);
    assert_eq!(loaded.corpus.len(), corpus.len());
    assert_eq!(loaded.corpus.spam_count(), corpus.spam_count());
    for (a, b) in corpus.documents().iter().zip(loaded.corpus.documents()) {
        assert_eq!(a.label, b.label);
        assert_eq!(a.arrival_index, b.arrival_index);
    }
}

#[test]
fn incremental_beats_batch_on_a_drifting_stream() {
    let partition = partition_stream(&drifting_corpus(), 1.0 / 3.0, 10, true, 0).unwrap();
    let config = DriftConfig::<f64> { feature_dim: 100, ..DriftConfig::default() };

    let batch = run_session(&partition, &config, SessionMode::Batch).unwrap();
    let incremental = run_session(&partition, &config, SessionMode::Incremental).unwrap();

    assert!(batch.retrains.is_empty());
    assert!(!incremental.retrains.is_empty());
    assert!(incremental.cumulative.accuracy > batch.cumulative.accuracy);
    assert_eq!(batch.partition_checksum, incremental.partition_checksum);
    assert_eq!(incremental.batches.len(), 10);
    assert!(incremental.halted.is_none());
}

#[test]
fn every_selector_runs_a_batch_session() {
    let partition = partition_stream(&drifting_corpus(), 0.5, 4, false, 3).unwrap();
    for selector in Selector::ALL {
        let config = DriftConfig::<f64> { feature_dim: 50, selector, ..DriftConfig::default() };
        let report = run_session(&partition, &config, SessionMode::Batch).unwrap();
        assert_eq!(report.batches.len(), 4, "{selector:?}");
        assert!(report.cumulative.accuracy > 0.5, "{selector:?}");
    }
}

#[test]
fn single_precision_session_tracks_double() {
    let partition = partition_stream(&drifting_corpus(), 1.0 / 3.0, 10, true, 0).unwrap();
    let wide = run_session(&partition, &DriftConfig::<f64> { feature_dim: 100, ..DriftConfig::default() }, SessionMode::Incremental)
        .unwrap();
    let narrow = run_session(&partition, &DriftConfig::<f32> { feature_dim: 100, ..DriftConfig::default() }, SessionMode::Incremental)
        .unwrap();
    assert!((wide.cumulative.accuracy - f64::from(narrow.cumulative.accuracy)).abs() < 0.05);
}
