//! Ranked n-gram tables.
//!
//! Raw text is tokenized with the same rules as passphrase normalization and
//! counted with a sliding window for every n up to five. Each table is then
//! ordered by descending frequency (ties by key) and given competition ranks:
//! tied entries share a rank, and the entry after a tie group of size `t`
//! starting at rank `r` gets rank `r + t`.

mod io;
mod store;

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::normalize_word;

pub use io::{load_store, read_lexicon, save_store};
pub use store::{NgramEntry, NgramStore, NgramTable, Slot, StoreBuilder, StoreConfig};

/// Largest n-gram size held by a store.
pub const MAX_N: usize = 5;

/// Default number of top-ranked n-grams forbidden inside a passphrase.
pub const DEFAULT_BLACKLIST_K: u64 = 10_000;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus contains no tokens after normalization")]
    EmptyCorpus,
    #[error("frequency table is empty")]
    EmptyTable,
    #[error("n-gram length {0} outside 1..=5")]
    BadArity(usize),
    #[error("invalid lookup pattern: {0}")]
    BadPattern(&'static str),
    #[error("invalid token {0:?}")]
    BadToken(String),
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("no n-gram store at {}", .0.display())]
    StoreMissing(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A normalized word: non-empty, lowercase, letters and digits only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

impl Token {
    pub fn new(word: impl Into<String>) -> Result<Token, CorpusError> {
        let word = word.into();
        if word.is_empty() || normalize_word(&word) != word {
            return Err(CorpusError::BadToken(word));
        }
        Ok(Token(word))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Token {
    type Error = CorpusError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Token::new(s)
    }
}

impl From<Token> for String {
    fn from(t: Token) -> String {
        t.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// One to five tokens. Orders lexicographically word by word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NgramKey(Vec<Token>);

impl NgramKey {
    pub fn new(words: Vec<Token>) -> Result<NgramKey, CorpusError> {
        if words.is_empty() || words.len() > MAX_N {
            return Err(CorpusError::BadArity(words.len()));
        }
        Ok(NgramKey(words))
    }

    /// Builds a key from already-normalized words.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Result<NgramKey, CorpusError> {
        let tokens = words
            .iter()
            .map(|w| Token::new(w.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        NgramKey::new(tokens)
    }

    /// Splits on single spaces, e.g. `"book was good"`.
    pub fn parse(words: &str) -> Result<NgramKey, CorpusError> {
        NgramKey::from_words(&words.split(' ').collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn words(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.iter().map(Token::as_str)
    }
}

impl fmt::Display for NgramKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t.as_str())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedNgram {
    pub key: NgramKey,
    pub frequency: u64,
    pub rank: u64,
}

/// Per-n occurrence counts produced by [`extract_ngrams`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NgramCounts {
    tables: Vec<HashMap<NgramKey, u64>>,
    total_tokens: u64,
}

impl NgramCounts {
    pub fn max_n(&self) -> usize {
        self.tables.len()
    }

    /// Counts for n-grams of length `n`; empty when `n` exceeds the extracted range.
    pub fn table(&self, n: usize) -> Option<&HashMap<NgramKey, u64>> {
        n.checked_sub(1).and_then(|i| self.tables.get(i))
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn stats(&self) -> CorpusStats {
        let mut counts = [0u64; MAX_N];
        for (i, t) in self.tables.iter().enumerate() {
            counts[i] = t.len() as u64;
        }
        CorpusStats {
            counts,
            total_tokens: self.total_tokens,
        }
    }

    pub fn into_tables(self) -> Vec<HashMap<NgramKey, u64>> {
        self.tables
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusStats {
    /// Distinct n-grams for n = 1..=5.
    pub counts: [u64; MAX_N],
    pub total_tokens: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    pub max_n: usize,
    /// When set, windows never span `.`, `!` or `?`.
    pub sentence_boundaries: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            max_n: MAX_N,
            sentence_boundaries: false,
        }
    }
}

impl ExtractOptions {
    pub fn with_max_n(max_n: usize) -> Self {
        ExtractOptions {
            max_n,
            ..Default::default()
        }
    }
}

fn tokenize(segment: &str) -> Vec<Token> {
    segment
        .split_whitespace()
        .map(normalize_word)
        .filter(|w| !w.is_empty())
        .map(Token)
        .collect()
}

/// Counts every contiguous window of `1..=max_n` normalized tokens.
pub fn extract_ngrams(text: &str, opts: ExtractOptions) -> Result<NgramCounts, CorpusError> {
    if opts.max_n == 0 || opts.max_n > MAX_N {
        return Err(CorpusError::BadArity(opts.max_n));
    }
    let segments: Vec<Vec<Token>> = if opts.sentence_boundaries {
        text.split(['.', '!', '?']).map(tokenize).collect()
    } else {
        vec![tokenize(text)]
    };
    let total_tokens: usize = segments.iter().map(Vec::len).sum();
    if total_tokens == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut tables = vec![HashMap::new(); opts.max_n];
    for tokens in &segments {
        for (i, table) in tables.iter_mut().enumerate() {
            for window in tokens.windows(i + 1) {
                *table.entry(NgramKey(window.to_vec())).or_insert(0u64) += 1;
            }
        }
    }
    Ok(NgramCounts {
        tables,
        total_tokens: total_tokens as u64,
    })
}

/// Orders by descending frequency, then key, and assigns competition ranks.
pub fn rank_table<I>(freqs: I) -> Result<Vec<RankedNgram>, CorpusError>
where
    I: IntoIterator<Item = (NgramKey, u64)>,
{
    let mut entries: Vec<(NgramKey, u64)> = freqs.into_iter().collect();
    if entries.is_empty() {
        return Err(CorpusError::EmptyTable);
    }
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let ranks = competition_ranks(entries.iter().map(|e| e.1));
    Ok(entries
        .into_iter()
        .zip(ranks)
        .map(|((key, frequency), rank)| RankedNgram {
            key,
            frequency,
            rank,
        })
        .collect())
}

/// Ranks for frequencies already sorted in descending order.
pub(crate) fn competition_ranks(sorted_freqs: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut out = Vec::new();
    let mut prev: Option<u64> = None;
    let mut rank = 0u64;
    for (pos, f) in sorted_freqs.into_iter().enumerate() {
        if prev != Some(f) {
            rank = pos as u64 + 1;
            prev = Some(f);
        }
        out.push(rank);
    }
    out
}
