//! Per-term class statistics, TFDCR scoring, top-N selection, vectorization
//! and the selection-rank-weight feature update.

mod baseline;
mod vector;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Document, Label, LabeledCorpus};
use crate::error::{Error, Result};
use crate::scalar::{cmp_scalar, parse_scalar, Scalar};

pub use baseline::baseline_score;
pub use vector::{SparseVector, SpaceId};

/// Occurrence statistics of one term.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureCounts {
    pub term: String,
    /// Total occurrences in spam documents.
    pub term_freq_spam: usize,
    /// Total occurrences in legitimate documents.
    pub term_freq_legit: usize,
    /// Spam documents containing the term.
    pub doc_freq_spam: usize,
    /// Legitimate documents containing the term.
    pub doc_freq_legit: usize,
}

impl FeatureCounts {
    pub fn empty(term: impl Into<String>) -> Self {
        FeatureCounts {
            term: term.into(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusCounts {
    counts: BTreeMap<String, FeatureCounts>,
    spam_docs: usize,
    legit_docs: usize,
}

impl CorpusCounts {
    pub fn get(&self, term: &str) -> Option<&FeatureCounts> {
        self.counts.get(term)
    }

    /// Counts for `term`, all zero when the term never occurs.
    pub fn get_or_empty(&self, term: &str) -> FeatureCounts {
        self.counts
            .get(term)
            .cloned()
            .unwrap_or_else(|| FeatureCounts::empty(term))
    }

    /// Terms in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = &FeatureCounts> {
        self.counts.values()
    }

    pub fn vocabulary_size(&self) -> usize {
        self.counts.len()
    }

    pub fn spam_docs(&self) -> usize {
        self.spam_docs
    }

    pub fn legit_docs(&self) -> usize {
        self.legit_docs
    }
}

/// Exact term and document frequencies per class. Unlabeled documents are
/// ignored.
pub fn count_stats(corpus: &LabeledCorpus) -> Result<CorpusCounts> {
    count_documents(corpus.documents())
}

pub(crate) fn count_documents<'a, I>(documents: I) -> Result<CorpusCounts>
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut counts: BTreeMap<String, FeatureCounts> = BTreeMap::new();
    let (mut spam_docs, mut legit_docs) = (0, 0);
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for doc in documents {
        let spam = match doc.label {
            Label::Spam => true,
            Label::Legitimate => false,
            Label::Unlabeled => continue,
        };
        if spam {
            spam_docs += 1;
        } else {
            legit_docs += 1;
        }
        seen.clear();
        for t in &doc.tokens {
            *seen.entry(t.as_str()).or_default() += 1;
        }
        for (&term, &tf) in &seen {
            let fc = counts
                .entry(term.to_owned())
                .or_insert_with(|| FeatureCounts::empty(term));
            if spam {
                fc.term_freq_spam += tf;
                fc.doc_freq_spam += 1;
            } else {
                fc.term_freq_legit += tf;
                fc.doc_freq_legit += 1;
            }
        }
    }
    if spam_docs + legit_docs == 0 {
        return Err(Error::NoLabeledDocuments);
    }
    Ok(CorpusCounts {
        counts,
        spam_docs,
        legit_docs,
    })
}

/// Document frequency substituted for a zero frequency in a ratio denominator.
pub const ZERO_DOC_FREQ_SMOOTHING: f64 = 0.5;

/// The class-ratio factor of the TFDCR weight: the larger of the two
/// category-ratio quotients, with zero denominators smoothed to 0.5.
pub fn category_ratio_product<F: Scalar>(fc: &FeatureCounts, n_spam: usize, n_legit: usize) -> F {
    let ns = F::from_count(n_spam.max(1));
    let nl = F::from_count(n_legit.max(1));
    let dfs = F::from_count(fc.doc_freq_spam);
    let dfl = F::from_count(fc.doc_freq_legit);
    let smooth = |df: F| if df.is_zero() { F::lit(ZERO_DOC_FREQ_SMOOTHING) } else { df };
    if dfs / ns > dfl / nl {
        (dfs / ns) * (nl / smooth(dfl))
    } else {
        (dfl / nl) * (ns / smooth(dfs))
    }
}

/// TFDCR discriminative weight: `|tf_s - tf_l| * category_ratio_product`.
pub fn tfdcr_weight<F: Scalar>(fc: &FeatureCounts, n_spam: usize, n_legit: usize) -> F {
    let diff = fc.term_freq_spam.abs_diff(fc.term_freq_legit);
    F::from_count(diff) * category_ratio_product(fc, n_spam, n_legit)
}

/// Rank weight used to vet new features during an update:
/// `|df_s/N_S - df_l/N_L| * |tf_s - tf_l| / (tf_s + tf_l)`, in `[0, 1]`.
pub fn selection_rank_weight<F: Scalar>(fc: &FeatureCounts, n_spam: usize, n_legit: usize) -> F {
    let total = fc.term_freq_spam + fc.term_freq_legit;
    if total == 0 {
        return F::zero();
    }
    let rs = F::from_count(fc.doc_freq_spam) / F::from_count(n_spam.max(1));
    let rl = F::from_count(fc.doc_freq_legit) / F::from_count(n_legit.max(1));
    let diff = F::from_count(fc.term_freq_spam.abs_diff(fc.term_freq_legit));
    (rs - rl).abs() * diff / F::from_count(total)
}

/// Feature-scoring functions available for top-N selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Tfdcr,
    Ig,
    Chi,
    Gini,
    Igr,
    Cfs,
}

impl Selector {
    pub const ALL: [Selector; 6] = [
        Selector::Tfdcr,
        Selector::Ig,
        Selector::Chi,
        Selector::Gini,
        Selector::Igr,
        Selector::Cfs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Selector::Tfdcr => "tfdcr",
            Selector::Ig => "ig",
            Selector::Chi => "chi",
            Selector::Gini => "gini",
            Selector::Igr => "igr",
            Selector::Cfs => "cfs",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Selector::ALL
            .into_iter()
            .find(|sel| sel.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnsupportedMethod(s.to_owned()))
    }
}

/// Scores every term of the vocabulary with `selector`.
pub fn score_features<F: Scalar>(selector: Selector, counts: &CorpusCounts) -> Result<BTreeMap<String, F>> {
    match selector {
        Selector::Tfdcr => Ok(counts
            .iter()
            .map(|fc| {
                let w = tfdcr_weight(fc, counts.spam_docs, counts.legit_docs);
                (fc.term.clone(), w)
            })
            .collect()),
        other => baseline_score(other, counts),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ScoredFeature<F: Scalar> {
    pub term: String,
    /// Selector score; the TFDCR discriminative weight for TFDCR sets.
    pub weight: F,
}

/// Ordered, duplicate-free list of selected features. A term's position in
/// the list is its coordinate in vectorized documents.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet<F: Scalar> {
    features: Vec<ScoredFeature<F>>,
    index: HashMap<String, usize>,
    space: SpaceId,
}

impl<F: Scalar> FeatureSet<F> {
    /// Wraps an already ordered list, rejecting duplicates and terms that
    /// cannot be written in the line format.
    pub fn from_features(features: Vec<ScoredFeature<F>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(features.len());
        let mut hasher = Sha256::new();
        for (pos, f) in features.iter().enumerate() {
            if f.term.is_empty() || f.term.contains(['\t', '\n', '\r']) {
                return Err(Error::invalid("term", format!("unusable feature term {:?}", f.term)));
            }
            if index.insert(f.term.clone(), pos).is_some() {
                return Err(Error::invalid("term", format!("duplicate feature `{}`", f.term)));
            }
            hasher.update(f.term.as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        Ok(FeatureSet {
            features,
            index,
            space: SpaceId(u64::from_be_bytes(head)),
        })
    }

    pub fn features(&self) -> &[ScoredFeature<F>] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.term.as_str())
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    /// One `term<TAB>weight` line per feature, LF-terminated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.features {
            out.push_str(&f.term);
            out.push('\t');
            out.push_str(&f.weight.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut features = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: &str| Error::Parse {
                line: idx + 1,
                message: message.to_owned(),
            };
            let (term, weight) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected term<TAB>weight"))?;
            let weight = parse_scalar(weight).ok_or_else(|| parse_err("bad weight"))?;
            features.push(ScoredFeature {
                term: term.to_owned(),
                weight,
            });
        }
        Self::from_features(features)
    }
}

/// Rank order: weight descending, then term ascending.
fn rank_cmp<F: Scalar>(a: &ScoredFeature<F>, b: &ScoredFeature<F>) -> std::cmp::Ordering {
    cmp_scalar(b.weight, a.weight).then_with(|| a.term.cmp(&b.term))
}

/// Keeps the `n` best-ranked features (fewer when the vocabulary is smaller).
pub fn rank_top_n<F: Scalar>(scores: impl IntoIterator<Item = (String, F)>, n: usize) -> FeatureSet<F> {
    let mut all: Vec<ScoredFeature<F>> = scores
        .into_iter()
        .map(|(term, weight)| ScoredFeature { term, weight })
        .collect();
    all.sort_by(rank_cmp);
    all.truncate(n);
    FeatureSet::from_features(all).expect("scores keyed by unique terms")
}

/// Top-`n` TFDCR features.
pub fn select_top_n<F: Scalar>(counts: &CorpusCounts, n: usize) -> FeatureSet<F> {
    let scores = score_features(Selector::Tfdcr, counts).expect("tfdcr is infallible");
    rank_top_n(scores, n)
}

/// Top-`n` features under any selector.
pub fn select_features<F: Scalar>(selector: Selector, counts: &CorpusCounts, n: usize) -> Result<FeatureSet<F>> {
    if n == 0 {
        return Err(Error::invalid("feature_dim", "must be at least 1"));
    }
    Ok(rank_top_n(score_features(selector, counts)?, n))
}

/// In-document term frequencies of the selected features, L2-normalized.
/// Documents without any selected feature map to the empty vector.
pub fn vectorize<F: Scalar>(doc: &Document, fs: &FeatureSet<F>) -> SparseVector<F> {
    let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
    for t in &doc.tokens {
        if let Some(p) = fs.position(t) {
            *tf.entry(p).or_default() += 1;
        }
    }
    let norm = F::from_count(tf.values().map(|c| c * c).sum::<usize>()).sqrt();
    let entries = tf
        .into_iter()
        .map(|(p, c)| (p, F::from_count(c) / norm))
        .collect();
    SparseVector::new(entries)
        .expect("positions sorted by construction")
        .with_space(fs.space())
}

/// Outcome of one feature-set update.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureUpdate<F: Scalar> {
    pub feature_set: FeatureSet<F>,
    pub replaced: usize,
    pub added: Vec<String>,
    pub removed: Vec<String>,
}

/// Replaces weak incumbents with strong newcomers found in `retrain_corpus`.
///
/// Candidates are the top-`n` TFDCR features of the retraining corpus; those
/// not already selected form the distinct new set. Each newcomer whose
/// selection rank weight strictly exceeds the mean over that set is added,
/// and the same number of incumbents with the lowest TFDCR weight (recomputed
/// over `retrain_corpus`) are dropped. The result keeps `fs_prev.len()`
/// features, ranked by their retraining-corpus weight.
pub fn update_feature_set<F: Scalar>(
    fs_prev: &FeatureSet<F>,
    retrain_corpus: &LabeledCorpus,
    n: usize,
) -> Result<FeatureUpdate<F>> {
    update_from_counts(fs_prev, &count_stats(retrain_corpus)?, n)
}

pub(crate) fn update_from_counts<F: Scalar>(
    fs_prev: &FeatureSet<F>,
    counts: &CorpusCounts,
    n: usize,
) -> Result<FeatureUpdate<F>> {
    let (ns, nl) = (counts.spam_docs, counts.legit_docs);
    let candidates: FeatureSet<F> = select_top_n(counts, n);
    let distinct: Vec<&ScoredFeature<F>> = candidates
        .features()
        .iter()
        .filter(|f| !fs_prev.contains(&f.term))
        .collect();

    let mut added = Vec::new();
    if !distinct.is_empty() {
        let srw: Vec<F> = distinct
            .iter()
            .map(|f| selection_rank_weight(&counts.get_or_empty(&f.term), ns, nl))
            .collect();
        let mean = srw.iter().copied().sum::<F>() / F::from_count(srw.len());
        added = distinct
            .iter()
            .zip(&srw)
            .filter(|(_, &w)| w > mean)
            .map(|(f, _)| (*f).clone())
            .collect();
    }
    added.truncate(fs_prev.len());

    let mut incumbents: Vec<ScoredFeature<F>> = fs_prev
        .terms()
        .map(|term| ScoredFeature {
            term: term.to_owned(),
            weight: tfdcr_weight(&counts.get_or_empty(term), ns, nl),
        })
        .collect();
    // worst-ranked first
    incumbents.sort_by(|a, b| rank_cmp(b, a));
    let removed: Vec<String> = incumbents
        .drain(..added.len())
        .map(|f| f.term)
        .collect();

    let added_terms: Vec<String> = added.iter().map(|f| f.term.clone()).collect();
    incumbents.extend(added);
    incumbents.sort_by(rank_cmp);
    Ok(FeatureUpdate {
        feature_set: FeatureSet::from_features(incumbents)?,
        replaced: added_terms.len(),
        added: added_terms,
        removed,
    })
}
