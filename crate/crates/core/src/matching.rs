//! Text normalization and tolerant comparison.
//!
//! Passphrases are compared in a canonical form: lowercase, letters and digits
//! only, single spaces between words. The verifier accepts an attempt when its
//! Levenshtein distance to the stored canonical phrase, divided by the stored
//! length, does not exceed the configured tolerance.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative edit distance accepted at login: one edit per eight characters.
pub const DEFAULT_TOLERANCE: f64 = 0.125;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("phrase is empty after normalization")]
    EmptyPhrase,
    #[error("tolerance {0} outside [0, 1)")]
    BadTolerance(String),
}

/// A passphrase after case folding, punctuation removal and whitespace collapse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct NormalizedPhrase {
    canonical: String,
}

impl NormalizedPhrase {
    pub fn tokens(&self) -> impl Iterator<Item = &str> + '_ {
        self.canonical.split(' ')
    }

    pub fn token_vec(&self) -> Vec<&str> {
        self.tokens().collect()
    }

    pub fn word_count(&self) -> usize {
        self.tokens().count()
    }

    /// Single-space-joined canonical form.
    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    /// Length of the canonical form in characters.
    pub fn char_len(&self) -> usize {
        self.canonical.chars().count()
    }
}

impl fmt::Display for NormalizedPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

impl From<NormalizedPhrase> for String {
    fn from(p: NormalizedPhrase) -> String {
        p.canonical
    }
}

impl TryFrom<String> for NormalizedPhrase {
    type Error = MatchError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        normalize(&s)
    }
}

/// Normalizes a single whitespace-free word. Returns an empty string when
/// nothing survives.
pub fn normalize_word(raw: &str) -> String {
    raw.chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric())
        .collect()
}

/// Lowercases, drops everything but letters, digits and whitespace, and
/// collapses whitespace runs.
pub fn normalize(raw: &str) -> Result<NormalizedPhrase, MatchError> {
    let mut canonical = String::with_capacity(raw.len());
    for word in raw.split_whitespace() {
        let word = normalize_word(word);
        if word.is_empty() {
            continue;
        }
        if !canonical.is_empty() {
            canonical.push(' ');
        }
        canonical.push_str(&word);
    }
    if canonical.is_empty() {
        return Err(MatchError::EmptyPhrase);
    }
    Ok(NormalizedPhrase { canonical })
}

/// Minimal number of single-character insertions, deletions and
/// substitutions turning `a` into `b`. Operates on Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

pub(crate) fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            let next = (diag + cost).min(row[j] + 1).min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

/// Maximum relative edit distance accepted by the verifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ToleranceConfig {
    max_relative_distance: f64,
}

impl ToleranceConfig {
    pub fn new(max_relative_distance: f64) -> Result<Self, MatchError> {
        if !(0.0..1.0).contains(&max_relative_distance) {
            return Err(MatchError::BadTolerance(max_relative_distance.to_string()));
        }
        Ok(ToleranceConfig {
            max_relative_distance,
        })
    }

    pub fn max_relative_distance(&self) -> f64 {
        self.max_relative_distance
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            max_relative_distance: DEFAULT_TOLERANCE,
        }
    }
}

impl TryFrom<f64> for ToleranceConfig {
    type Error = MatchError;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        ToleranceConfig::new(v)
    }
}

impl From<ToleranceConfig> for f64 {
    fn from(c: ToleranceConfig) -> f64 {
        c.max_relative_distance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ToleranceVerdict {
    pub accepted: bool,
    pub distance: usize,
    pub relative: f64,
}

/// Compares canonical strings (spaces included). The ratio is taken against
/// the stored phrase, whose length does not depend on the attempt.
pub fn within_tolerance(
    stored: &NormalizedPhrase,
    attempt: &str,
    cfg: &ToleranceConfig,
) -> ToleranceVerdict {
    let distance = levenshtein(stored.canonical(), attempt);
    let relative = distance as f64 / stored.char_len() as f64;
    ToleranceVerdict {
        accepted: relative <= cfg.max_relative_distance,
        distance,
        relative,
    }
}
