//! Plain-text form of [`FilterState`]. Sections are introduced by a keyword
//! and an item count; floats use the shortest round-trip decimal.
//!
//! ```text
//! spamdrift-state 1
//! generation <g>
//! features <n>        followed by n lines `term<TAB>weight`
//! model <lines>       followed by the model dump
//! sv_documents <k>    followed by k document lines
//! misclassified <m>   followed by m document lines
//! history <h>         followed by h lines `accuracy<TAB>fpr|none`
//! ```
//!
//! A document line is `id<TAB>spam|legit|unlabeled<TAB>arrival<TAB>tokens`,
//! tokens separated by single spaces.

use std::fmt::Write as _;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BatchStats, FilterState};
use crate::corpus::{Document, Label};
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::scalar::{parse_scalar, Scalar};
use crate::svm::SvmModel;

const MAGIC: &str = "spamdrift-state 1";

fn write_document(out: &mut String, d: &Document) -> Result<()> {
    if d.id.is_empty() || d.id.contains(['\t', '\n', '\r']) {
        return Err(Error::format("state", format!("unwritable document id {:?}", d.id)));
    }
    if let Some(t) = d.tokens.iter().find(|t| t.is_empty() || t.contains(char::is_whitespace)) {
        return Err(Error::format("state", format!("unwritable token {t:?} in {}", d.id)));
    }
    let label = match d.label {
        Label::Spam => "spam",
        Label::Legitimate => "legit",
        Label::Unlabeled => "unlabeled",
    };
    writeln!(out, "{}\t{label}\t{}\t{}", d.id, d.arrival_index, d.tokens.join(" ")).unwrap();
    Ok(())
}

impl<F: Scalar> FilterState<F> {
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "generation {}", self.generation).unwrap();
        writeln!(out, "features {}", self.feature_set.len()).unwrap();
        out.push_str(&self.feature_set.to_text());
        let model = self.model.to_text()?;
        writeln!(out, "model {}", model.lines().count()).unwrap();
        out.push_str(&model);
        writeln!(out, "sv_documents {}", self.sv_documents.len()).unwrap();
        for d in &self.sv_documents {
            write_document(&mut out, d)?;
        }
        writeln!(out, "misclassified {}", self.misclassified.len()).unwrap();
        for d in &self.misclassified {
            write_document(&mut out, d)?;
        }
        writeln!(out, "history {}", self.batch_history.len()).unwrap();
        for h in &self.batch_history {
            match h.fpr {
                Some(fpr) => writeln!(out, "{}\t{fpr}", h.accuracy).unwrap(),
                None => writeln!(out, "{}\tnone", h.accuracy).unwrap(),
            }
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut reader = Reader { lines: text.lines().collect(), pos: 0 };
        if reader.next()? != MAGIC {
            return Err(reader.error("not a filter state dump"));
        }
        let generation = reader.header("generation")?;
        let n = reader.header("features")?;
        let feature_set = FeatureSet::from_text(&reader.block(n)?).map_err(|e| reader.nested(e))?;
        let n = reader.header("model")?;
        let model = SvmModel::from_text(&reader.block(n)?).map_err(|e| reader.nested(e))?;
        let n = reader.header("sv_documents")?;
        let sv_documents = reader.documents(n)?;
        let n = reader.header("misclassified")?;
        let misclassified = reader.documents(n)?;
        let n = reader.header("history")?;
        let mut batch_history = Vec::with_capacity(n);
        for _ in 0..n {
            let line = reader.next()?;
            let (acc, fpr) = line.split_once('\t').ok_or_else(|| reader.error("expected accuracy<TAB>fpr"))?;
            let accuracy = parse_scalar(acc).ok_or_else(|| reader.error("bad accuracy"))?;
            let fpr = match fpr {
                "none" => None,
                v => Some(parse_scalar(v).ok_or_else(|| reader.error("bad fpr"))?),
            };
            batch_history.push(BatchStats { accuracy, fpr });
        }
        if reader.pos != reader.lines.len() {
            return Err(reader.error("trailing content"));
        }
        if model.support().len() != sv_documents.len()
            || model.support().iter().zip(&sv_documents).any(|(sv, d)| sv.id != d.id)
        {
            return Err(Error::format("state", "support vectors and their documents disagree"));
        }
        Ok(FilterState { generation, feature_set, model, sv_documents, misclassified, batch_history })
    }
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { line: self.pos, message: message.to_owned() }
    }

    fn nested(&self, e: Error) -> Error {
        Error::format("state", format!("section ending at line {}: {e}", self.pos))
    }

    fn next(&mut self) -> Result<&'a str> {
        let line = *self.lines.get(self.pos).ok_or_else(|| Error::Parse {
            line: self.pos + 1,
            message: "unexpected end of input".into(),
        })?;
        self.pos += 1;
        Ok(line)
    }

    fn header(&mut self, key: &str) -> Result<usize> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| self.error(&format!("expected `{key} <count>`")))
    }

    fn block(&mut self, n: usize) -> Result<String> {
        let mut out = String::new();
        for _ in 0..n {
            out.push_str(self.next()?);
            out.push('\n');
        }
        Ok(out)
    }

    fn documents(&mut self, n: usize) -> Result<Vec<Document>> {
        (0..n).map(|_| self.document()).collect()
    }

    fn document(&mut self) -> Result<Document> {
        let line = self.next()?;
        let mut parts = line.splitn(4, '\t');
        let (Some(id), Some(label), Some(arrival), Some(tokens)) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(self.error("expected id<TAB>label<TAB>arrival<TAB>tokens"));
        };
        let label = match label {
            "spam" => Label::Spam,
            "legit" => Label::Legitimate,
            "unlabeled" => Label::Unlabeled,
            _ => return Err(self.error("bad label")),
        };
        let arrival = arrival.parse().map_err(|_| self.error("bad arrival index"))?;
        let tokens = tokens.split(' ').filter(|t| !t.is_empty()).map(str::to_owned).collect();
        Ok(Document::new(id, label, tokens, arrival))
    }
}

impl<F: Scalar> Serialize for FilterState<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let text = self.to_text().map_err(serde::ser::Error::custom)?;
        serializer.serialize_str(&text)
    }
}

impl<'de, F: Scalar> Deserialize<'de> for FilterState<F> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        FilterState::from_text(&text).map_err(D::Error::custom)
    }
}
