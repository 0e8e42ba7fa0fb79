//! Seeded two-phase synthetic corpora with an abrupt spam vocabulary change.

use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Document, Label, LabeledCorpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    /// Tokens per class pool.
    pub vocab_size: usize,
    /// Documents generated per phase; the corpus holds twice as many.
    pub docs_per_phase: usize,
    /// Arrival index at which the second phase starts.
    pub drift_point: usize,
    /// Fraction of the phase-one spam pool kept in the phase-two spam pool.
    pub overlap: f64,
    /// Share of phase-two spam tokens drawn from the legitimate pool when
    /// `overlap` is 0; scaled by `1 - overlap`.
    pub camouflage: f64,
    pub min_doc_len: usize,
    pub max_doc_len: usize,
    /// Zipf exponent of token popularity inside a pool.
    pub zipf_exponent: f64,
}

impl SynthParams {
    pub fn new(vocab_size: usize, docs_per_phase: usize, overlap: f64) -> Self {
        SynthParams {
            vocab_size,
            docs_per_phase,
            drift_point: docs_per_phase,
            overlap,
            camouflage: 0.5,
            min_doc_len: 20,
            max_doc_len: 40,
            zipf_exponent: 0.8,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.overlap) {
            return Err(Error::invalid(
                "overlap",
                format!("must lie in [0, 1], got {}", self.overlap),
            ));
        }
        if !(0.0..=1.0).contains(&self.camouflage) {
            return Err(Error::invalid("camouflage", "must lie in [0, 1]"));
        }
        if self.vocab_size == 0 {
            return Err(Error::invalid("vocab_size", "must be at least 1"));
        }
        if self.docs_per_phase == 0 {
            return Err(Error::invalid("docs_per_phase", "must be at least 1"));
        }
        if self.drift_point > 2 * self.docs_per_phase {
            return Err(Error::invalid(
                "drift_point",
                "must not exceed the corpus size (2 * docs_per_phase)",
            ));
        }
        if self.min_doc_len == 0 || self.min_doc_len > self.max_doc_len {
            return Err(Error::invalid("min_doc_len", "need 1 <= min_doc_len <= max_doc_len"));
        }
        Ok(())
    }
}

struct Pool {
    tokens: Vec<String>,
    weights: WeightedIndex<f64>,
}

impl Pool {
    fn new(tokens: Vec<String>, exponent: f64) -> Self {
        let weights = (1..=tokens.len()).map(|r| (r as f64).powf(-exponent));
        Pool {
            weights: WeightedIndex::new(weights).expect("non-empty pool"),
            tokens,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> String {
        self.tokens[self.weights.sample(rng)].clone()
    }
}

fn names(prefix: char, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i:04}")).collect()
}

fn balanced_labels(n: usize, rng: &mut ChaCha8Rng) -> Vec<Label> {
    let mut labels: Vec<Label> = (0..n)
        .map(|i| if i < n / 2 { Label::Spam } else { Label::Legitimate })
        .collect();
    labels.shuffle(rng);
    labels
}

/// Generates a `2 * docs_per_phase` document corpus.
///
/// Before `drift_point` spam and legitimate documents draw from disjoint
/// pools. From `drift_point` on, spam draws from a pool that keeps
/// `overlap * vocab_size` phase-one spam tokens and fills the rest with fresh
/// ones, and mixes in legitimate-pool tokens at rate
/// `camouflage * (1 - overlap)`. Output is a pure function of the seed.
/// Document ids match the paths written by [`dump_enron_layout`].
pub fn synth_drift(seed: u64, params: &SynthParams) -> Result<LabeledCorpus> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = params.vocab_size;
    let legit = Pool::new(names('l', v), params.zipf_exponent);

    let mut old_spam = names('s', v);
    old_spam.shuffle(&mut rng);
    let spam_one = Pool::new(old_spam.clone(), params.zipf_exponent);

    let shared = ((params.overlap * v as f64).round() as usize).min(v);
    let mut new_spam: Vec<String> = old_spam[..shared].to_vec();
    new_spam.extend(names('f', v - shared));
    if shared < v {
        new_spam.shuffle(&mut rng);
    }
    let spam_two = Pool::new(new_spam, params.zipf_exponent);
    let camouflage = params.camouflage * (1.0 - params.overlap);

    let total = 2 * params.docs_per_phase;
    let mut labels = balanced_labels(params.drift_point, &mut rng);
    labels.extend(balanced_labels(total - params.drift_point, &mut rng));

    let mut documents = Vec::with_capacity(total);
    for (arrival, label) in labels.into_iter().enumerate() {
        let len = rng.gen_range(params.min_doc_len..=params.max_doc_len);
        let drifted = arrival >= params.drift_point;
        let tokens = (0..len)
            .map(|_| match (label, drifted) {
                (Label::Spam, false) => spam_one.draw(&mut rng),
                (Label::Spam, true) => {
                    if camouflage > 0.0 && rng.gen_bool(camouflage) {
                        legit.draw(&mut rng)
                    } else {
                        spam_two.draw(&mut rng)
                    }
                }
                _ => legit.draw(&mut rng),
            })
            .collect();
        let sub = if label == Label::Spam { "spam" } else { "ham" };
        documents.push(Document::new(
            format!("{sub}/{arrival:06}.txt"),
            label,
            tokens,
            arrival,
        ));
    }
    Ok(LabeledCorpus::from_sorted(documents))
}

/// Writes a corpus in the Enron layout (`spam/`, `ham/`, one file per
/// document named by zero-padded arrival index, tokens space-separated).
pub fn dump_enron_layout(corpus: &LabeledCorpus, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    for sub in ["spam", "ham"] {
        let path = dir.join(sub);
        fs::create_dir_all(&path).map_err(|source| Error::Io { path, source })?;
    }
    for d in corpus.documents() {
        let sub = match d.label {
            Label::Spam => "spam",
            Label::Legitimate => "ham",
            Label::Unlabeled => continue,
        };
        let path = dir.join(sub).join(format!("{:06}.txt", d.arrival_index));
        let mut body = d.tokens.join(" ");
        body.push('\n');
        fs::write(&path, body).map_err(|source| Error::Io { path, source })?;
    }
    Ok(())
}
