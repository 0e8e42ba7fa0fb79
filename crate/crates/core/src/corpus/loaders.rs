//! Loaders for the three on-disk dataset layouts.

use std::fs;
use std::path::{Path, PathBuf};

use super::{Document, Label, LabeledCorpus, Preprocessor};
use crate::error::{Error, Result};

/// A loaded corpus plus the files that had to be skipped.
#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub corpus: LabeledCorpus,
    pub skipped: Vec<PathBuf>,
}

impl LoadOutcome {
    pub fn warnings(&self) -> usize {
        self.skipped.len()
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_owned(),
        source,
    }
}

fn require_dir(path: &Path) -> Result<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(Error::MissingPath(path.to_owned()))
    }
}

/// Regular files directly inside `dir`, sorted by file name.
fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let entry = entry.map_err(|e| io_err(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn read_lossy(path: &Path) -> Option<String> {
    fs::read(path)
        .ok()
        .map(|bytes| String::from_utf8_lossy(&bytes).into_owned())
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Loads an Enron-style folder: `spam/` and `ham/` subdirectories whose file
/// names sort chronologically. Arrival order is the merged file-name order.
pub fn load_enron(dir: impl AsRef<Path>, pre: &Preprocessor) -> Result<LoadOutcome> {
    let dir = dir.as_ref();
    require_dir(dir)?;
    let mut entries = Vec::new();
    for (sub, label) in [("ham", Label::Legitimate), ("spam", Label::Spam)] {
        let subdir = dir.join(sub);
        require_dir(&subdir)?;
        for path in sorted_files(&subdir)? {
            entries.push((file_name(&path), sub, label, path));
        }
    }
    entries.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));

    let mut documents = Vec::with_capacity(entries.len());
    let mut skipped = Vec::new();
    for (name, sub, label, path) in entries {
        match read_lossy(&path) {
            Some(text) => {
                let arrival = documents.len();
                documents.push(Document::new(
                    format!("{sub}/{name}"),
                    label,
                    pre.preprocess(&text),
                    arrival,
                ));
            }
            None => skipped.push(path),
        }
    }
    Ok(LoadOutcome {
        corpus: LabeledCorpus::from_sorted(documents),
        skipped,
    })
}

/// How PU file names encode the class. The spam marker is tested first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuNaming {
    pub spam_marker: String,
    pub legit_marker: String,
}

impl Default for PuNaming {
    fn default() -> Self {
        PuNaming {
            spam_marker: "spmsg".into(),
            legit_marker: "msg".into(),
        }
    }
}

impl PuNaming {
    fn classify(&self, name: &str) -> Option<Label> {
        if name.contains(&self.spam_marker) {
            Some(Label::Spam)
        } else if name.contains(&self.legit_marker) {
            Some(Label::Legitimate)
        } else {
            None
        }
    }
}

/// Token representation of PU message bodies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PuEncoding {
    /// Words already replaced by integer ids: split on non-alphanumerics and
    /// keep every token, digits included.
    #[default]
    NumericIds,
    /// Plain text run through the preprocessing pipeline.
    Text,
}

fn split_ids(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn collect_recursive(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        entries.push(entry.map_err(|e| io_err(dir, e))?.path());
    }
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_recursive(&path, out)?;
        } else if path.is_file() {
            out.push(path);
        }
    }
    Ok(())
}

/// Loads a PU-style directory of fold subdirectories. PU corpora carry no
/// arrival order, so arrival index is the sorted relative path position.
pub fn load_pu(
    dir: impl AsRef<Path>,
    naming: &PuNaming,
    encoding: PuEncoding,
    pre: &Preprocessor,
) -> Result<LoadOutcome> {
    let dir = dir.as_ref();
    require_dir(dir)?;
    let mut files = Vec::new();
    collect_recursive(dir, &mut files)?;

    let mut documents = Vec::new();
    let mut skipped = Vec::new();
    for path in files {
        let Some(label) = naming.classify(&file_name(&path)) else {
            skipped.push(path);
            continue;
        };
        let Some(text) = read_lossy(&path) else {
            skipped.push(path);
            continue;
        };
        let tokens = match encoding {
            PuEncoding::NumericIds => split_ids(&text),
            PuEncoding::Text => pre.preprocess(&text),
        };
        let rel = path.strip_prefix(dir).unwrap_or(&path);
        let id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        let arrival = documents.len();
        documents.push(Document::new(id, label, tokens, arrival));
    }
    Ok(LoadOutcome {
        corpus: LabeledCorpus::from_sorted(documents),
        skipped,
    })
}

/// Loads a line-oriented token-count file: `label tokenId:count ...` with
/// label `1`/`+1` (spam) or `-1` (legitimate). Blank lines and `#` comments
/// are skipped. Tokens are the id strings repeated `count` times; no text
/// preprocessing is applied.
pub fn load_ecml(file_path: impl AsRef<Path>) -> Result<LabeledCorpus> {
    let path = file_path.as_ref();
    if !path.is_file() {
        return Err(Error::MissingPath(path.to_owned()));
    }
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_ecml(&text, &stem)
}

pub(crate) fn parse_ecml(text: &str, source: &str) -> Result<LabeledCorpus> {
    let mut documents = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let mut fields = line.split_whitespace();
        let label = match fields.next() {
            Some("1") | Some("+1") => Label::Spam,
            Some("-1") => Label::Legitimate,
            Some(other) => return Err(parse_err(format!("bad label `{other}`"))),
            None => unreachable!("non-empty line"),
        };
        let mut tokens = Vec::new();
        for pair in fields {
            let (id, count) = pair
                .split_once(':')
                .ok_or_else(|| parse_err(format!("expected tokenId:count, got `{pair}`")))?;
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(parse_err(format!("bad token id in `{pair}`")));
            }
            let count: i64 = count
                .parse()
                .map_err(|_| parse_err(format!("bad count in `{pair}`")))?;
            if count < 0 {
                return Err(parse_err(format!("negative count in `{pair}`")));
            }
            tokens.extend(std::iter::repeat_n(id.to_owned(), count as usize));
        }
        let arrival = documents.len();
        documents.push(Document::new(
            format!("{source}:{line_no}"),
            label,
            tokens,
            arrival,
        ));
    }
    Ok(LabeledCorpus::from_sorted(documents))
}
