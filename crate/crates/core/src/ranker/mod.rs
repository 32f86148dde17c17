//! N-gram guess-number calculator.
//!
//! The attacker model walks n from 5 down to 1 and slides a window of n words
//! across the passphrase from left to right. For each window it counts the
//! trailing run of words not yet matched. If the run is one short of n and the
//! word just before it (inside the window) or just after the window is already
//! matched, the search is widened to include that word and the remaining slots
//! become wildcards: only n-grams containing the known word are considered, and
//! a match is scored by its position in that subset instead of its global rank.
//! Otherwise a window whose words are all unmatched is searched exactly.
//!
//! Every successful search contributes a rank to `score`; every unsuccessful
//! one contributes the guess effort of exhausting what was searched to
//! `score_not_found`. The low estimate is the product of `score`, the high
//! estimate adds (or multiplies in) the product of `score_not_found`.

mod estimate;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::corpus::{NgramStore, MAX_N};
use crate::matching::NormalizedPhrase;

use estimate::product;
pub use estimate::{log2_big, Guess, NOT_GUESSABLE};

/// Minimum passphrase length the permutation attacker starts enumerating at.
pub const DEFAULT_MIN_WORDS: usize = 7;

/// How the high estimate folds in unsuccessful searches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HighCombiner {
    /// `Π score + Π score_not_found`; an empty `score_not_found` adds nothing.
    #[default]
    Sum,
    /// `Π score × Π score_not_found`; an empty `score_not_found` multiplies by one.
    Product,
}

impl std::str::FromStr for HighCombiner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(HighCombiner::Sum),
            "product" => Ok(HighCombiner::Product),
            other => Err(format!(
                "unknown high combiner {other:?} (expected sum|product)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankerConfig {
    pub high_combiner: HighCombiner,
    /// Shortest phrase length the permutation attacker enumerates.
    pub min_words: usize,
    /// Replaces the store's lexicon size in the permutation prefix term.
    pub vocab_override: Option<u64>,
}

impl Default for RankerConfig {
    fn default() -> Self {
        RankerConfig {
            high_combiner: HighCombiner::Sum,
            min_words: DEFAULT_MIN_WORDS,
            vocab_override: None,
        }
    }
}

/// A run of passphrase words matched by one search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FoundSpan {
    pub start_index: usize,
    pub n: usize,
    pub words: Vec<String>,
    pub rank_used: u64,
    /// The rank came from a search anchored on an already matched word.
    pub dynamic: bool,
}

/// Raw factors collected by one descent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchTrace {
    pub score: Vec<u64>,
    pub score_not_found: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuessEstimate {
    pub low: Guess,
    pub high: Guess,
    pub unigram: Guess,
    pub found_spans: Vec<FoundSpan>,
    pub unfound_words: Vec<String>,
    pub trace: SearchTrace,
}

impl GuessEstimate {
    pub fn is_guessable(&self) -> bool {
        self.unfound_words.is_empty()
    }
}

impl Serialize for GuessEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Record<'a> {
            low: &'a Guess,
            high: &'a Guess,
            unigram: &'a Guess,
            low_bits: Option<f64>,
            high_bits: Option<f64>,
            unigram_bits: Option<f64>,
            found_spans: &'a [FoundSpan],
            unfound_words: &'a [String],
        }
        Record {
            low: &self.low,
            high: &self.high,
            unigram: &self.unigram,
            low_bits: self.low.bits(),
            high_bits: self.high.bits(),
            unigram_bits: self.unigram.bits(),
            found_spans: &self.found_spans,
            unfound_words: &self.unfound_words,
        }
        .serialize(s)
    }
}

/// Result of the 1-gram-only attack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnigramEstimate {
    pub guesses: Guess,
    /// Rank of each word in the 1-gram table, `None` when absent.
    pub word_ranks: Vec<Option<u64>>,
    pub unfound_words: Vec<String>,
}

struct Descent {
    found: Vec<bool>,
    trace: SearchTrace,
    spans: Vec<FoundSpan>,
}

/// Runs the breadth-first descent from `largest` down to 1-grams.
fn descend(store: &NgramStore, words: &[&str], largest: usize) -> Descent {
    let len = words.len();
    let ids: Vec<Option<u32>> = words.iter().map(|w| store.word_id(w)).collect();
    let mut d = Descent {
        found: vec![false; len],
        trace: SearchTrace::default(),
        spans: Vec::new(),
    };

    for n in (1..=largest.min(MAX_N)).rev() {
        if n > len {
            continue;
        }
        let table = store.table(n).expect("n within 1..=5");
        for i in 0..=len - n {
            // trailing run of unmatched words inside the window
            let mut run = 0;
            for p in i..i + n {
                run = if d.found[p] { 0 } else { run + 1 };
            }

            let mut start = i;
            let mut anchored = false;
            if n > 1 && run + 1 >= n {
                if d.found[i] {
                    anchored = true;
                    run += 1;
                } else if i + n < len && d.found[i + n] {
                    anchored = true;
                    run = n;
                    start = i + 1;
                }
            }
            if run < n || table.is_empty() {
                continue;
            }

            let window = start..start + n;
            let target = &ids[window.clone()];
            let pattern: Vec<Option<u32>> = window
                .clone()
                .map(|p| {
                    if anchored && !d.found[p] {
                        None
                    } else {
                        ids[p]
                    }
                })
                .collect();
            let results = if pattern.iter().any(|s| s.is_none()) && !anchored {
                // an exact search containing an unknown word
                Vec::new()
            } else {
                table.matching_positions(&pattern)
            };
            let is_target = |pos: usize| {
                table
                    .key_ids(pos)
                    .iter()
                    .zip(target)
                    .all(|(id, want)| Some(*id) == *want)
            };

            let mut matched: Option<u64> = None;
            if results.len() > 1 {
                let mut dynamic_rank = 0u64;
                for &pos in &results {
                    dynamic_rank += 1;
                    if is_target(pos) {
                        matched = Some(if anchored {
                            dynamic_rank
                        } else {
                            table.rank_at(pos)
                        });
                    }
                }
                if matched.is_none() {
                    d.trace.score_not_found.push(if anchored {
                        dynamic_rank
                    } else {
                        table.max_rank()
                    });
                }
            } else if results.len() == 1 && is_target(results[0]) {
                // a unique anchored candidate costs a single guess
                matched = Some(if anchored {
                    1
                } else {
                    table.rank_at(results[0])
                });
            } else {
                d.trace.score_not_found.push(table.max_rank());
            }

            if let Some(rank) = matched {
                d.trace.score.push(rank);
                for p in window.clone() {
                    d.found[p] = true;
                }
                d.spans.push(FoundSpan {
                    start_index: start,
                    n,
                    words: words[window].iter().map(|w| w.to_string()).collect(),
                    rank_used: rank,
                    dynamic: anchored,
                });
            }
        }
    }
    d
}

fn unfound(words: &[&str], found: &[bool]) -> Vec<String> {
    words
        .iter()
        .zip(found)
        .filter(|(_, f)| !**f)
        .map(|(w, _)| w.to_string())
        .collect()
}

/// Runs the n-gram attack and the 1-gram permutation attack on a phrase.
pub fn rank_passphrase(
    phrase: &NormalizedPhrase,
    store: &NgramStore,
    cfg: &RankerConfig,
) -> GuessEstimate {
    rank_words(&phrase.token_vec(), store, cfg)
}

/// [`rank_passphrase`] over already-normalized words.
pub fn rank_words(words: &[&str], store: &NgramStore, cfg: &RankerConfig) -> GuessEstimate {
    let d = descend(store, words, MAX_N);
    let unfound_words = unfound(words, &d.found);
    let unigram = unigram_words(words, store, cfg).guesses;

    let (low, high) = if unfound_words.is_empty() && !words.is_empty() {
        let low = product(&d.trace.score);
        let high = match cfg.high_combiner {
            HighCombiner::Sum if d.trace.score_not_found.is_empty() => low.clone(),
            HighCombiner::Sum => &low + product(&d.trace.score_not_found),
            HighCombiner::Product => &low * product(&d.trace.score_not_found),
        };
        (Guess::Guessable(low), Guess::Guessable(high))
    } else {
        (Guess::NotGuessable, Guess::NotGuessable)
    };

    GuessEstimate {
        low,
        high,
        unigram,
        found_spans: d.spans,
        unfound_words,
        trace: d.trace,
    }
}

/// Product of 1-gram ranks plus the cost of enumerating every shorter
/// permutation from `min_words` up to one word less than the phrase.
pub fn unigram_permutation_estimate(
    phrase: &NormalizedPhrase,
    store: &NgramStore,
    cfg: &RankerConfig,
) -> UnigramEstimate {
    unigram_words(&phrase.token_vec(), store, cfg)
}

pub fn unigram_words(words: &[&str], store: &NgramStore, cfg: &RankerConfig) -> UnigramEstimate {
    let d = descend(store, words, 1);
    let unfound_words = unfound(words, &d.found);
    let word_ranks = words.iter().map(|w| store.rank_of(&[w])).collect();
    let guesses = if unfound_words.is_empty() && !words.is_empty() {
        let vocab = BigUint::from(cfg.vocab_override.unwrap_or_else(|| store.lexicon_size()));
        let mut prefix = BigUint::zero();
        for k in cfg.min_words..words.len() {
            prefix += vocab.pow(k as u32);
        }
        Guess::Guessable(product(&d.trace.score) + prefix)
    } else {
        Guess::NotGuessable
    };
    UnigramEstimate {
        guesses,
        word_ranks,
        unfound_words,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AttackSummary {
    pub phrases: usize,
    pub ngram_guessable: usize,
    pub unigram_guessable: usize,
    pub ngram_fraction: f64,
    pub unigram_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AttackReport {
    pub rows: Vec<GuessEstimate>,
    pub summary: AttackSummary,
}

/// Ranks every phrase and reports the fraction each estimator reaches.
pub fn attack_report(
    phrases: &[NormalizedPhrase],
    store: &NgramStore,
    cfg: &RankerConfig,
) -> AttackReport {
    let rows: Vec<GuessEstimate> = phrases
        .iter()
        .map(|p| rank_passphrase(p, store, cfg))
        .collect();
    let summary = summarize(&rows);
    AttackReport { rows, summary }
}

pub fn summarize(rows: &[GuessEstimate]) -> AttackSummary {
    let ngram = rows.iter().filter(|r| r.low.is_guessable()).count();
    let unigram = rows.iter().filter(|r| r.unigram.is_guessable()).count();
    let frac = |k: usize| {
        if rows.is_empty() {
            0.0
        } else {
            k as f64 / rows.len() as f64
        }
    };
    AttackSummary {
        phrases: rows.len(),
        ngram_guessable: ngram,
        unigram_guessable: unigram,
        ngram_fraction: frac(ngram),
        unigram_fraction: frac(unigram),
    }
}
