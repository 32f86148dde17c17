//! Creation policy: hard requirements and advisory recommendations.
//!
//! Requirements: a minimum word count, at least one proper noun, and no
//! 3-, 4- or 5-word window among the top-K entries of the matching n-gram
//! table. Recommendations: include slang or non-dictionary words, and avoid
//! very common word pairs (reported only; pairs are never forbidden).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::corpus::{NgramStore, DEFAULT_BLACKLIST_K};
use crate::matching::{normalize, normalize_word, NormalizedPhrase};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct PolicyConfig {
    pub min_words: usize,
    #[serde(rename = "blacklistK")]
    pub blacklist_k: u64,
    pub blacklist_ns: BTreeSet<usize>,
    pub require_proper_noun: bool,
    /// Minimum characters per word; 1 disables the check.
    pub min_word_chars: usize,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            min_words: 7,
            blacklist_k: DEFAULT_BLACKLIST_K,
            blacklist_ns: [3, 4, 5].into_iter().collect(),
            require_proper_noun: true,
            min_word_chars: 1,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.min_words == 0 {
            return Err("minWords must be at least 1".into());
        }
        if let Some(n) = self.blacklist_ns.iter().find(|n| !(3..=5).contains(*n)) {
            return Err(format!("blacklisted n-gram size {n} outside 3..=5"));
        }
        Ok(())
    }
}

/// Stable identifiers consumed by the API and UI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PolicyCode {
    WordCount,
    ProperNoun,
    BlacklistedNgram,
    EmptyPhrase,
    ShortWord,
    NoSlang,
    CommonBigrams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub code: PolicyCode,
    pub message: String,
    pub evidence: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlacklistedWindow {
    pub n: usize,
    pub start_index: usize,
    pub words: Vec<String>,
    pub rank: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PolicyReport {
    pub acceptable: bool,
    pub violations: Vec<Finding>,
    pub recommendations: Vec<Finding>,
    pub word_count: usize,
    pub proper_noun_tokens: Vec<String>,
    pub slang_tokens: Vec<String>,
    pub non_dictionary_tokens: Vec<String>,
    pub blacklisted_windows: Vec<BlacklistedWindow>,
}

impl PolicyReport {
    pub fn has(&self, code: PolicyCode) -> bool {
        self.violations
            .iter()
            .chain(&self.recommendations)
            .any(|f| f.code == code)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TokenClass {
    pub token: String,
    pub in_lexicon: bool,
    pub slang: bool,
    pub not_found_anywhere: bool,
}

/// Lexicon and slang membership for every token of the phrase.
pub fn classify_tokens(phrase: &NormalizedPhrase, store: &NgramStore) -> Vec<TokenClass> {
    phrase
        .tokens()
        .map(|t| {
            let in_lexicon = store.in_lexicon(t);
            let slang = store.is_slang(t);
            TokenClass {
                token: t.to_owned(),
                in_lexicon,
                slang,
                not_found_anywhere: !in_lexicon && !slang,
            }
        })
        .collect()
}

/// Tokens that count as proper nouns, in phrase order without repeats.
///
/// A token qualifies when it is in the store's proper-noun lexicon, when it
/// was capitalized anywhere but the first position of the raw input, or when
/// it is absent from the 1-gram lexicon.
pub fn detect_proper_nouns(raw: &str, store: &NgramStore) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut position = 0usize;
    for raw_word in raw.split_whitespace() {
        let token = normalize_word(raw_word);
        if token.is_empty() {
            continue;
        }
        let capitalized = position > 0
            && token != "i"
            && raw_word
                .chars()
                .find(|c| c.is_alphanumeric())
                .is_some_and(char::is_uppercase);
        position += 1;
        let qualifies = store.is_proper_noun(&token) || capitalized || !store.in_lexicon(&token);
        if qualifies && !out.contains(&token) {
            out.push(token);
        }
    }
    out
}

fn finding(code: PolicyCode, message: impl Into<String>, evidence: Value) -> Finding {
    Finding {
        code,
        message: message.into(),
        evidence,
    }
}

/// Evaluates a raw passphrase. Failing the policy is reported in the result,
/// never as an error.
pub fn check_policy(raw: &str, store: &NgramStore, cfg: &PolicyConfig) -> PolicyReport {
    let phrase = match normalize(raw) {
        Ok(p) => p,
        Err(_) => {
            return PolicyReport {
                acceptable: false,
                violations: vec![finding(
                    PolicyCode::EmptyPhrase,
                    "Enter a passphrase made of words",
                    Value::Null,
                )],
                recommendations: Vec::new(),
                word_count: 0,
                proper_noun_tokens: Vec::new(),
                slang_tokens: Vec::new(),
                non_dictionary_tokens: Vec::new(),
                blacklisted_windows: Vec::new(),
            }
        }
    };
    let tokens = phrase.token_vec();
    let mut violations = Vec::new();
    let mut recommendations = Vec::new();

    if tokens.len() < cfg.min_words {
        violations.push(finding(
            PolicyCode::WordCount,
            format!("At least {} words in length", cfg.min_words),
            json!({ "wordCount": tokens.len(), "minWords": cfg.min_words }),
        ));
    }

    if cfg.min_word_chars > 1 {
        let short: Vec<&str> = tokens
            .iter()
            .copied()
            .filter(|t| t.chars().count() < cfg.min_word_chars)
            .collect();
        if !short.is_empty() {
            violations.push(finding(
                PolicyCode::ShortWord,
                format!(
                    "Every word needs at least {} characters",
                    cfg.min_word_chars
                ),
                json!({ "words": short }),
            ));
        }
    }

    let proper_noun_tokens = detect_proper_nouns(raw, store);
    if cfg.require_proper_noun && proper_noun_tokens.is_empty() {
        violations.push(finding(
            PolicyCode::ProperNoun,
            "Use at least one proper noun: a name, place or thing such as McDonalds or ThinkPad",
            Value::Null,
        ));
    }

    let mut blacklisted_windows = Vec::new();
    for &n in &cfg.blacklist_ns {
        for (start, window) in tokens.windows(n).enumerate() {
            if let Some(rank) = store.rank_with_cutoff(window, cfg.blacklist_k) {
                blacklisted_windows.push(BlacklistedWindow {
                    n,
                    start_index: start,
                    words: window.iter().map(|w| w.to_string()).collect(),
                    rank,
                });
            }
        }
    }
    for w in &blacklisted_windows {
        violations.push(finding(
            PolicyCode::BlacklistedNgram,
            format!("\"{}\" is too common a phrase", w.words.join(" ")),
            json!({ "n": w.n, "startIndex": w.start_index, "words": w.words, "rank": w.rank }),
        ));
    }

    let classes = classify_tokens(&phrase, store);
    let slang_tokens = dedup(classes.iter().filter(|c| c.slang).map(|c| &c.token));
    let non_dictionary_tokens = dedup(classes.iter().filter(|c| !c.in_lexicon).map(|c| &c.token));
    if slang_tokens.is_empty() && non_dictionary_tokens.is_empty() {
        recommendations.push(finding(
            PolicyCode::NoSlang,
            "Try slang or a word you would not find in a dictionary",
            Value::Null,
        ));
    }

    let common_pairs: Vec<Value> = tokens
        .windows(2)
        .enumerate()
        .filter_map(|(start, w)| {
            store
                .rank_with_cutoff(w, cfg.blacklist_k)
                .map(|rank| json!({ "startIndex": start, "words": w, "rank": rank }))
        })
        .collect();
    if !common_pairs.is_empty() {
        recommendations.push(finding(
            PolicyCode::CommonBigrams,
            "Some word pairs are very common; less predictable pairings are stronger",
            Value::Array(common_pairs),
        ));
    }

    PolicyReport {
        acceptable: violations.is_empty(),
        violations,
        recommendations,
        word_count: tokens.len(),
        proper_noun_tokens,
        slang_tokens,
        non_dictionary_tokens,
        blacklisted_windows,
    }
}

fn dedup<'a>(it: impl Iterator<Item = &'a String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in it {
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::StoreBuilder;
    use proptest::prelude::*;

    const LEXICON: &str = "i visited mcdonalds yesterday with my friend the dog and \
        deploys lenovo thinkpads for all students one two three four five six seven";

    fn base() -> StoreBuilder {
        let mut b = NgramStore::builder();
        for (i, w) in LEXICON.split_whitespace().enumerate() {
            b.add(&[w], 1_000 - i as u64).unwrap();
        }
        b
    }

    #[test]
    fn example_phrase_accepted() {
        let store = base().proper_noun("uoit").build();
        let r = check_policy(
            "UOIT deploys Lenovo ThinkPads for all students",
            &store,
            &PolicyConfig::default(),
        );
        assert!(r.acceptable, "{r:#?}");
        assert!(r.violations.is_empty());
        assert_eq!(r.word_count, 7);
        assert!(r.proper_noun_tokens.contains(&"uoit".to_string()));
    }

    #[test]
    fn too_few_words() {
        let store = base().build();
        let r = check_policy(
            "one two three four five six",
            &store,
            &PolicyConfig::default(),
        );
        assert!(r.has(PolicyCode::WordCount));
        assert!(!r.acceptable);
        let r = check_policy("one two three", &store, &PolicyConfig::default());
        let wc = &r.violations[0];
        assert_eq!(wc.code, PolicyCode::WordCount);
        assert_eq!(wc.evidence["wordCount"], 3);
    }

    #[test]
    fn rank_one_trigram_blacklisted() {
        let store = base()
            .ngram("with my friend", 500)
            .proper_noun("bob")
            .build();
        let r = check_policy(
            "Bob went with my friend to town",
            &store,
            &PolicyConfig::default(),
        );
        assert!(r.has(PolicyCode::BlacklistedNgram));
        assert_eq!(
            r.blacklisted_windows,
            vec![BlacklistedWindow {
                n: 3,
                start_index: 2,
                words: vec!["with".into(), "my".into(), "friend".into()],
                rank: 1,
            }]
        );
    }

    #[test]
    fn empty_phrase_is_a_violation() {
        let store = base().build();
        let r = check_policy("  ?? !! ", &store, &PolicyConfig::default());
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].code, PolicyCode::EmptyPhrase);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["violations"][0]["code"], "EMPTY_PHRASE");
    }

    #[test]
    fn proper_noun_rules() {
        let store = base().build();
        assert_eq!(
            detect_proper_nouns("i visited McDonalds yesterday with my friend", &store),
            vec!["mcdonalds"]
        );
        assert!(detect_proper_nouns("i visited the dog with my friend", &store).is_empty());
        // capitalized first word and the pronoun "I" do not count
        assert!(detect_proper_nouns("The dog and I visited", &store).is_empty());
        assert_eq!(
            detect_proper_nouns("the dog said bazinga", &store),
            vec!["said", "bazinga"]
        );
        let store = base().proper_noun("dog").build();
        assert_eq!(detect_proper_nouns("the dog", &store), vec!["dog"]);
    }

    #[test]
    fn token_classes() {
        let store = base().slang("dog").build();
        let phrase = normalize("the dog decemeber").unwrap();
        let c = classify_tokens(&phrase, &store);
        assert!(c[0].in_lexicon && !c[0].slang && !c[0].not_found_anywhere);
        assert!(c[1].in_lexicon && c[1].slang);
        assert!(c[2].not_found_anywhere);
    }

    #[test]
    fn recommendations() {
        let store = base().ngram("the dog", 40).proper_noun("friend").build();
        let r = check_policy(
            "the dog and my friend visited mcdonalds",
            &store,
            &PolicyConfig::default(),
        );
        assert!(r.acceptable);
        assert!(r.has(PolicyCode::NoSlang));
        assert!(r.has(PolicyCode::CommonBigrams));
        let r = check_policy(
            "the dog and my friend visited wazzup",
            &store,
            &PolicyConfig::default(),
        );
        assert!(!r.has(PolicyCode::NoSlang));
    }

    #[test]
    fn abuse_guard() {
        let store = base().build();
        let lax = check_policy("1 1 1 1 1 1 1", &store, &PolicyConfig::default());
        assert!(lax.acceptable);
        let cfg = PolicyConfig {
            min_word_chars: 2,
            ..Default::default()
        };
        let strict = check_policy("1 1 1 1 1 1 1", &store, &cfg);
        assert!(strict.has(PolicyCode::ShortWord));
    }

    #[test]
    fn config_validation() {
        assert!(PolicyConfig::default().validate().is_ok());
        let bad = PolicyConfig {
            blacklist_ns: [2].into_iter().collect(),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    fn window_store() -> NgramStore {
        let mut b = base();
        b.add(&["the", "dog", "and"], 300).unwrap();
        b.add(&["dog", "and", "my"], 200).unwrap();
        b.add(&["with", "my", "friend", "the"], 100).unwrap();
        b.add(&["my", "friend", "the", "dog", "and"], 50).unwrap();
        b.build()
    }

    proptest! {
        #[test]
        fn blacklist_sound_and_complete(
            idx in proptest::collection::vec(0usize..10, 1..12),
            k in 0u64..3,
        ) {
            let vocab = ["the", "dog", "and", "my", "friend", "with", "i", "one", "two", "seven"];
            let raw: Vec<&str> = idx.iter().map(|&i| vocab[i]).collect();
            let store = window_store();
            let cfg = PolicyConfig { blacklist_k: k, ..Default::default() };
            let r = check_policy(&raw.join(" "), &store, &cfg);
            let mut expected = 0;
            for n in 3..=5 {
                for w in raw.windows(n) {
                    if store.rank_of(w).is_some_and(|rank| rank <= k) {
                        expected += 1;
                    }
                }
            }
            prop_assert_eq!(r.blacklisted_windows.len(), expected);
            for w in &r.blacklisted_windows {
                prop_assert!(w.rank <= k);
            }
        }

        #[test]
        fn case_and_punctuation_do_not_change_hard_checks(
            idx in proptest::collection::vec(0usize..10, 1..12),
            upper in proptest::collection::vec(any::<bool>(), 12),
        ) {
            let vocab = ["the", "dog", "and", "my", "friend", "with", "i", "one", "two", "seven"];
            let plain: Vec<&str> = idx.iter().map(|&i| vocab[i]).collect();
            let styled: Vec<String> = plain
                .iter()
                .zip(&upper)
                .map(|(w, &u)| if u { w.to_uppercase() } else { w.to_string() })
                .collect();
            let store = window_store();
            let cfg = PolicyConfig { blacklist_k: 3, ..Default::default() };
            let a = check_policy(&plain.join(" "), &store, &cfg);
            let b = check_policy(&format!("{}!!", styled.join(" ")), &store, &cfg);
            prop_assert_eq!(a.has(PolicyCode::WordCount), b.has(PolicyCode::WordCount));
            prop_assert_eq!(&a.blacklisted_windows, &b.blacklisted_windows);
            prop_assert_eq!(&a, &check_policy(&plain.join(" "), &store, &cfg));
        }

        #[test]
        fn raising_min_words_keeps_word_count_violation(len in 1usize..10, extra in 0usize..5) {
            let store = window_store();
            let raw = vec!["dog"; len].join(" ");
            let lo = PolicyConfig { min_words: 7, ..Default::default() };
            let hi = PolicyConfig { min_words: 7 + extra, ..Default::default() };
            if check_policy(&raw, &store, &lo).has(PolicyCode::WordCount) {
                prop_assert!(check_policy(&raw, &store, &hi).has(PolicyCode::WordCount));
            }
        }
    }
}
