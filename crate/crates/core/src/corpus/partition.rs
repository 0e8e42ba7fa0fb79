use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::LabeledCorpus;
use crate::error::{Error, Result};

/// A training corpus followed by disjoint test batches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamPartition {
    pub training: LabeledCorpus,
    pub test_batches: Vec<LabeledCorpus>,
}

impl StreamPartition {
    pub fn test_len(&self) -> usize {
        self.test_batches.iter().map(LabeledCorpus::len).sum()
    }

    /// Hex SHA-256 over the document ids of every part, in order.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        let parts = std::iter::once(&self.training).chain(&self.test_batches);
        for (i, part) in parts.enumerate() {
            hasher.update(format!("#part {i}\n"));
            for d in part.documents() {
                hasher.update(d.id.as_bytes());
                hasher.update(b"\n");
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Splits a corpus into a training prefix of `ceil(train_fraction * n)`
/// documents and `n_batches` contiguous test batches whose sizes differ by at
/// most one (larger batches first).
///
/// With `chronological` the arrival order is kept, otherwise the documents
/// are shuffled with a ChaCha8 generator seeded by `seed`.
pub fn partition_stream(
    corpus: &LabeledCorpus,
    train_fraction: f64,
    n_batches: usize,
    chronological: bool,
    seed: u64,
) -> Result<StreamPartition> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(
            "train_fraction",
            format!("must lie in (0, 1), got {train_fraction}"),
        ));
    }
    if n_batches == 0 {
        return Err(Error::invalid("n_batches", "must be at least 1"));
    }
    if corpus.is_empty() {
        return Err(Error::invalid("corpus", "must not be empty"));
    }
    let n = corpus.len();
    // 1e-9 slack keeps exact fractions such as 1/3 * 30 from rounding up to 11
    let n_train = ((train_fraction * n as f64) - 1e-9).ceil().max(1.0) as usize;
    let n_test = n - n_train.min(n);
    if n_batches > n_test {
        return Err(Error::invalid(
            "n_batches",
            format!("{n_batches} batches exceed the {n_test} test documents"),
        ));
    }

    let mut docs = corpus.documents().to_vec();
    if !chronological {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        docs.shuffle(&mut rng);
    }
    let rest = docs.split_off(n_train);
    Ok(StreamPartition {
        training: into_corpus(docs),
        test_batches: split_batches(rest, n_batches),
    })
}

/// Binds a separate training corpus and test corpus. The test documents keep
/// their order, are renumbered to arrive after every training document and
/// are cut into `n_batches` contiguous batches.
pub fn partition_holdout(
    training: &LabeledCorpus,
    test: &LabeledCorpus,
    n_batches: usize,
) -> Result<StreamPartition> {
    if training.is_empty() || test.is_empty() {
        return Err(Error::invalid("corpus", "training and test parts must not be empty"));
    }
    if n_batches == 0 || n_batches > test.len() {
        return Err(Error::invalid(
            "n_batches",
            format!("must lie in 1..={}, got {n_batches}", test.len()),
        ));
    }
    let offset = training.documents().last().map_or(0, |d| d.arrival_index + 1);
    let rest = test
        .documents()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut d = d.clone();
            d.arrival_index = offset + i;
            d
        })
        .collect();
    Ok(StreamPartition {
        training: training.clone(),
        test_batches: split_batches(rest, n_batches),
    })
}

/// Contiguous batches, the larger ones first.
fn split_batches(mut rest: Vec<super::Document>, n_batches: usize) -> Vec<LabeledCorpus> {
    let base = rest.len() / n_batches;
    let extra = rest.len() % n_batches;
    let mut test_batches = Vec::with_capacity(n_batches);
    for b in 0..n_batches {
        let size = base + usize::from(b < extra);
        let tail = rest.split_off(size);
        test_batches.push(into_corpus(std::mem::replace(&mut rest, tail)));
    }
    test_batches
}

fn into_corpus(mut docs: Vec<super::Document>) -> LabeledCorpus {
    docs.sort_by_key(|d| d.arrival_index);
    LabeledCorpus::from_sorted(docs)
}
