//! Tokenization, stop-word removal and the full preprocessing pipeline.

use std::collections::HashSet;

use super::porter;

static DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Splits text into lowercase tokens.
///
/// Runs of non-alphanumeric characters separate tokens, pure-digit tokens and
/// tokens shorter than two characters are dropped.
pub fn tokenize(raw_text: &str) -> Vec<String> {
    raw_text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|piece| !piece.is_empty())
        .map(str::to_lowercase)
        .filter(|token| token.chars().count() >= 2 && !token.chars().all(|c| c.is_ascii_digit()))
        .collect()
}

/// A fixed set of lowercase words excluded from the vocabulary.
#[derive(Debug, Clone)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    /// The English list shipped in `data/stopwords.txt`.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    /// Parses one word per line; blank lines are ignored.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect();
        StopList { words }
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        StopList {
            words: words.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopList {
    fn default() -> Self {
        Self::english()
    }
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &StopList) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

pub use porter::stem;

/// Tokenize, drop stop words, stem.
///
/// Stemming is repeated until the token stops changing and the stop-list and
/// length filters run once more on the stems, so that feeding the output back
/// through the pipeline reproduces it exactly.
#[derive(Debug, Clone, Default)]
pub struct Preprocessor {
    stoplist: StopList,
}

const MAX_STEM_ROUNDS: usize = 8;

impl Preprocessor {
    pub fn new(stoplist: StopList) -> Self {
        Preprocessor { stoplist }
    }

    pub fn stoplist(&self) -> &StopList {
        &self.stoplist
    }

    pub fn preprocess(&self, raw_text: &str) -> Vec<String> {
        let tokens = remove_stopwords(tokenize(raw_text), &self.stoplist);
        tokens
            .into_iter()
            .map(|t| stem_fixpoint(&t))
            .filter(|t| t.chars().count() >= 2 && !self.stoplist.contains(t))
            .collect()
    }

    /// Runs the pipeline over a token sequence joined by spaces.
    pub fn preprocess_tokens(&self, tokens: &[String]) -> Vec<String> {
        self.preprocess(&tokens.join(" "))
    }
}

fn stem_fixpoint(token: &str) -> String {
    let mut current = token.to_owned();
    for _ in 0..MAX_STEM_ROUNDS {
        let next = stem(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Buy VIAGRA now!!"), vec!["buy", "viagra", "now"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("123 456").is_empty());
        assert_eq!(tokenize("a b-cd mp3 x"), vec!["cd", "mp3"]);
        assert_eq!(tokenize("don't\tstop\r\nHERE"), vec!["don", "stop", "here"]);
    }

    #[test]
    fn stopword_examples() {
        let the = StopList::from_words(["the"]);
        assert_eq!(
            remove_stopwords(vec!["the".into(), "cat".into()], &the),
            vec!["cat"]
        );
        assert!(remove_stopwords(vec![], &the).is_empty());
        let english = StopList::english();
        assert_eq!(
            remove_stopwords(vec!["a".into(), "an".into(), "offer".into()], &english),
            vec!["offer"]
        );
    }

    #[test]
    fn shipped_stoplist_is_lowercase_alphabetic() {
        let list = StopList::english();
        assert!(list.len() >= 250);
        for line in DEFAULT_STOPWORDS.lines() {
            assert!(line.chars().all(|c| c.is_ascii_lowercase()), "{line:?}");
        }
    }

    #[test]
    fn pipeline_drops_stems_that_land_on_stop_words() {
        let pre = Preprocessor::default();
        let out = pre.preprocess("The offers are being processed quickly, and the ponies ran");
        assert_eq!(out, vec!["offer", "process", "quickli", "poni", "ran"]);
    }

    proptest! {
        #[test]
        fn preprocessing_is_idempotent(text in "[a-zA-Z0-9 ,.!'-]{0,200}") {
            let pre = Preprocessor::default();
            let once = pre.preprocess(&text);
            let twice = pre.preprocess_tokens(&once);
            prop_assert_eq!(&once, &twice);
            for t in &once {
                prop_assert!(!t.chars().any(char::is_uppercase));
                prop_assert!(!pre.stoplist().contains(t));
                prop_assert!(!t.is_empty());
            }
        }

        #[test]
        fn idempotent_on_english_like_words(words in proptest::collection::vec("[a-z]{2,14}", 0..30)) {
            let pre = Preprocessor::default();
            let once = pre.preprocess(&words.join(" "));
            prop_assert_eq!(pre.preprocess_tokens(&once), once);
        }
    }
}
