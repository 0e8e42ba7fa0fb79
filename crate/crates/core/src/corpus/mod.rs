//! Documents, labeled corpora, dataset loaders and stream partitioning.

mod loaders;
mod partition;
mod porter;
mod synth;
mod text;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use loaders::{load_ecml, load_enron, load_pu, LoadOutcome, PuEncoding, PuNaming};
pub use partition::{partition_holdout, partition_stream, StreamPartition};
pub use synth::{dump_enron_layout, synth_drift, SynthParams};
pub use text::{remove_stopwords, stem, tokenize, Preprocessor, StopList};

/// Ground-truth class of a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Spam,
    Legitimate,
    Unlabeled,
}

impl Label {
    pub fn class(self) -> Option<Class> {
        match self {
            Label::Spam => Some(Class::Spam),
            Label::Legitimate => Some(Class::Legitimate),
            Label::Unlabeled => None,
        }
    }
}

impl From<Class> for Label {
    fn from(c: Class) -> Self {
        match c {
            Class::Spam => Label::Spam,
            Class::Legitimate => Label::Legitimate,
        }
    }
}

/// Binary target; spam is the positive (+1) class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    Spam,
    Legitimate,
}

impl Class {
    pub fn sign(self) -> i8 {
        match self {
            Class::Spam => 1,
            Class::Legitimate => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Option<Class> {
        match sign {
            1 => Some(Class::Spam),
            -1 => Some(Class::Legitimate),
            _ => None,
        }
    }

    pub fn flipped(self) -> Class {
        match self {
            Class::Spam => Class::Legitimate,
            Class::Legitimate => Class::Spam,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub label: Label,
    /// Post-preprocessing tokens in their original order.
    pub tokens: Vec<String>,
    /// Chronological position, unique within a corpus.
    pub arrival_index: usize,
}

impl Document {
    pub fn new(id: impl Into<String>, label: Label, tokens: Vec<String>, arrival_index: usize) -> Self {
        Document {
            id: id.into(),
            label,
            tokens,
            arrival_index,
        }
    }
}

/// Documents sorted by arrival, with class totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledCorpus {
    documents: Vec<Document>,
    spam_count: usize,
    legit_count: usize,
}

impl LabeledCorpus {
    /// Sorts by `arrival_index` and counts classes. Arrival indices must be unique.
    pub fn new(mut documents: Vec<Document>) -> Result<Self> {
        documents.sort_by_key(|d| d.arrival_index);
        if let Some(w) = documents
            .windows(2)
            .find(|w| w[0].arrival_index == w[1].arrival_index)
        {
            return Err(Error::DuplicateArrival(w[0].arrival_index));
        }
        Ok(Self::from_sorted(documents))
    }

    pub(crate) fn from_sorted(documents: Vec<Document>) -> Self {
        let spam_count = documents.iter().filter(|d| d.label == Label::Spam).count();
        let legit_count = documents
            .iter()
            .filter(|d| d.label == Label::Legitimate)
            .count();
        LabeledCorpus {
            documents,
            spam_count,
            legit_count,
        }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn spam_count(&self) -> usize {
        self.spam_count
    }

    pub fn legit_count(&self) -> usize {
        self.legit_count
    }

    pub fn labeled_count(&self) -> usize {
        self.spam_count + self.legit_count
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn has_both_classes(&self) -> bool {
        self.spam_count > 0 && self.legit_count > 0
    }

    /// Concatenates `times` copies, re-numbering arrival indices so they stay unique.
    pub fn repeated(&self, times: usize) -> LabeledCorpus {
        let n = self.documents.len();
        let mut docs = Vec::with_capacity(n * times);
        for copy in 0..times {
            for (pos, d) in self.documents.iter().enumerate() {
                let mut d = d.clone();
                d.arrival_index = copy * n + pos;
                if copy > 0 {
                    d.id = format!("{}#{}", d.id, copy);
                }
                docs.push(d);
            }
        }
        LabeledCorpus::from_sorted(docs)
    }
}
