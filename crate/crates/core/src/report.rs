//! Batch analyses over ranked phrase sets: guessing curves, slang and
//! not-found coverage, a tolerance audit and an exact known-phrase check.

use std::collections::HashSet;
use std::io::BufRead;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::corpus::NgramStore;
use crate::matching::{levenshtein_chars, normalize, NormalizedPhrase, ToleranceConfig};
use crate::policy::classify_tokens;
use crate::ranker::{log2_big, rank_passphrase, Guess, GuessEstimate, RankerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Low,
    High,
    Unigram,
}

impl Estimator {
    pub fn pick<'a>(&self, e: &'a GuessEstimate) -> &'a Guess {
        match self {
            Estimator::Low => &e.low,
            Estimator::High => &e.high,
            Estimator::Unigram => &e.unigram,
        }
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(Estimator::Low),
            "high" => Ok(Estimator::High),
            "unigram" => Ok(Estimator::Unigram),
            other => Err(format!(
                "unknown estimator {other:?} (expected low|high|unigram)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvePoint {
    pub log2_guesses: f64,
    pub fraction_guessed: f64,
}

/// Cumulative fraction of phrases guessed, stepping at each distinct
/// guess-number. The denominator counts unguessable phrases too.
pub fn guessing_curve(estimates: &[GuessEstimate], estimator: Estimator) -> Vec<CurvePoint> {
    curve_from_guesses(estimates.iter().map(|e| estimator.pick(e).clone()))
}

/// [`guessing_curve`] over bare guess-numbers.
pub fn curve_from_guesses(guesses: impl IntoIterator<Item = Guess>) -> Vec<CurvePoint> {
    let mut total = 0usize;
    let mut values: Vec<BigUint> = Vec::new();
    for g in guesses {
        total += 1;
        if let Guess::Guessable(v) = g {
            values.push(v);
        }
    }
    values.sort_unstable();

    let mut out: Vec<CurvePoint> = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len() && values[j] == values[i] {
            j += 1;
        }
        let point = CurvePoint {
            log2_guesses: log2_big(&values[i]),
            fraction_guessed: j as f64 / total as f64,
        };
        // distinct huge values can share one f64 logarithm
        match out.last_mut() {
            Some(last) if last.log2_guesses == point.log2_guesses => *last = point,
            _ => out.push(point),
        }
        i = j;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RescuedWord {
    pub word: String,
    pub lexicon_match: String,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ToleranceAuditRow {
    pub phrase_id: usize,
    pub rescued_words: Vec<RescuedWord>,
    /// Every unfound word of the phrase was rescued.
    pub fully_rescued: bool,
}

/// Edit radius allowed for a single word of `len` characters.
pub fn word_radius(len: usize, cfg: &ToleranceConfig) -> usize {
    let r = (cfg.max_relative_distance() * len as f64).floor() as usize;
    if len >= 8 {
        r.max(1)
    } else {
        r
    }
}

/// Closest 1-gram within the word's radius; ties go to the more frequent entry.
pub fn rescue_word(word: &str, store: &NgramStore, cfg: &ToleranceConfig) -> Option<RescuedWord> {
    let chars: Vec<char> = word.chars().collect();
    let radius = word_radius(chars.len(), cfg);
    if radius == 0 {
        return None;
    }
    let mut best: Option<(usize, &str)> = None;
    for entry in store.entries(1) {
        let cand = entry.first_word();
        let cand_chars: Vec<char> = cand.chars().collect();
        if cand_chars.len().abs_diff(chars.len()) > radius {
            continue;
        }
        let d = levenshtein_chars(&chars, &cand_chars);
        if d <= radius && best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, cand));
        }
    }
    best.map(|(distance, m)| RescuedWord {
        word: word.to_owned(),
        lexicon_match: m.to_owned(),
        distance,
    })
}

/// Audit row for one ranked phrase, `None` when nothing was unfound.
pub fn audit_estimate(
    phrase_id: usize,
    estimate: &GuessEstimate,
    store: &NgramStore,
    cfg: &ToleranceConfig,
) -> Option<ToleranceAuditRow> {
    if estimate.unfound_words.is_empty() {
        return None;
    }
    let rescued_words: Vec<RescuedWord> = estimate
        .unfound_words
        .iter()
        .filter_map(|w| rescue_word(w, store, cfg))
        .collect();
    Some(ToleranceAuditRow {
        phrase_id,
        fully_rescued: rescued_words.len() == estimate.unfound_words.len(),
        rescued_words,
    })
}

/// For each phrase with unfound words, the words a tolerant matcher would map
/// onto a 1-gram. Phrase ids are one-based input positions.
pub fn tolerance_audit(
    estimates: &[GuessEstimate],
    store: &NgramStore,
    cfg: &ToleranceConfig,
) -> Vec<ToleranceAuditRow> {
    estimates
        .iter()
        .enumerate()
        .filter_map(|(i, e)| audit_estimate(i + 1, e, store, cfg))
        .collect()
}

/// Normalized phrases known to be public, e.g. quotations or titles.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnownPhrases {
    set: HashSet<String>,
}

impl KnownPhrases {
    /// One phrase per line; lines that normalize to nothing are skipped.
    pub fn read(reader: impl BufRead) -> std::io::Result<KnownPhrases> {
        let mut set = HashSet::new();
        for line in reader.lines() {
            if let Ok(p) = normalize(&line?) {
                set.insert(p.canonical().to_owned());
            }
        }
        Ok(KnownPhrases { set })
    }

    pub fn contains(&self, phrase: &NormalizedPhrase) -> bool {
        self.set.contains(phrase.canonical())
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for KnownPhrases {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        KnownPhrases {
            set: iter
                .into_iter()
                .filter_map(|s| normalize(s.as_ref()).ok())
                .map(|p| p.canonical().to_owned())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PhraseHit {
    pub phrase_id: usize,
    pub phrase: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PhraseDictionaryReport {
    pub phrases: usize,
    pub hits: Vec<PhraseHit>,
}

/// Exact normalized matches against the known set.
pub fn phrase_dictionary_check(
    phrases: &[NormalizedPhrase],
    known: &KnownPhrases,
) -> PhraseDictionaryReport {
    let hits = phrases
        .iter()
        .enumerate()
        .filter(|(_, p)| known.contains(p))
        .map(|(i, p)| PhraseHit {
            phrase_id: i + 1,
            phrase: p.canonical().to_owned(),
        })
        .collect();
    PhraseDictionaryReport {
        phrases: phrases.len(),
        hits,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageRow {
    pub phrase_id: usize,
    pub word_count: usize,
    pub slang_hits: usize,
    pub not_found_count: usize,
    pub low_guessable: bool,
    pub high_guessable: bool,
    pub unigram_guessable: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageAggregate {
    pub phrases: usize,
    pub total_words: usize,
    pub slang_hits: usize,
    pub phrases_with_slang: usize,
    pub not_found_words: usize,
    pub phrases_with_not_found: usize,
    /// Share of words present in the lexicon or the slang list, in percent.
    pub percent_words_found: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageTable {
    pub rows: Vec<CoverageRow>,
    pub aggregate: CoverageAggregate,
}

pub fn coverage_row(
    phrase_id: usize,
    phrase: &NormalizedPhrase,
    store: &NgramStore,
    estimate: &GuessEstimate,
) -> CoverageRow {
    let classes = classify_tokens(phrase, store);
    CoverageRow {
        phrase_id,
        word_count: classes.len(),
        slang_hits: classes.iter().filter(|c| c.slang).count(),
        not_found_count: classes.iter().filter(|c| c.not_found_anywhere).count(),
        low_guessable: estimate.low.is_guessable(),
        high_guessable: estimate.high.is_guessable(),
        unigram_guessable: estimate.unigram.is_guessable(),
    }
}

impl CoverageAggregate {
    /// Adds one row to the running totals.
    pub fn push(&mut self, r: &CoverageRow) {
        self.phrases += 1;
        self.total_words += r.word_count;
        self.slang_hits += r.slang_hits;
        self.not_found_words += r.not_found_count;
        self.phrases_with_slang += usize::from(r.slang_hits > 0);
        self.phrases_with_not_found += usize::from(r.not_found_count > 0);
        self.percent_words_found = if self.total_words == 0 {
            0.0
        } else {
            100.0 * (self.total_words - self.not_found_words) as f64 / self.total_words as f64
        };
    }
}

/// Folds rows into phrase- and word-level totals.
pub fn aggregate_coverage<'a>(
    rows: impl IntoIterator<Item = &'a CoverageRow>,
) -> CoverageAggregate {
    let mut agg = CoverageAggregate::default();
    for r in rows {
        agg.push(r);
    }
    agg
}

pub fn coverage_table(
    phrases: &[NormalizedPhrase],
    store: &NgramStore,
    cfg: &RankerConfig,
) -> CoverageTable {
    let rows: Vec<CoverageRow> = phrases
        .iter()
        .enumerate()
        .map(|(i, p)| coverage_row(i + 1, p, store, &rank_passphrase(p, store, cfg)))
        .collect();
    let aggregate = aggregate_coverage(&rows);
    CoverageTable { rows, aggregate }
}
