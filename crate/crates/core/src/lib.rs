//! Passphrase policy enforcement and guessability estimation.
//!
//! The crate covers ranked n-gram tables built from plain text ([`corpus`]),
//! canonical comparison with edit-distance tolerance ([`matching`]), creation
//! policy checks ([`policy`]), an n-gram guess-number calculator ([`ranker`]),
//! closed-form and table-driven guesswork estimators ([`theory`]) and the
//! batch analyses built on top of them ([`report`]).

pub mod corpus;
pub mod matching;
pub mod policy;
pub mod ranker;
pub mod report;
pub mod theory;

pub use corpus::{
    extract_ngrams, load_store, rank_table, read_lexicon, save_store, CorpusError, CorpusStats,
    ExtractOptions, NgramKey, NgramStore, RankedNgram, Slot, StoreBuilder, StoreConfig, Token,
};
pub use matching::{
    levenshtein, normalize, within_tolerance, MatchError, NormalizedPhrase, ToleranceConfig,
    ToleranceVerdict,
};
pub use policy::{
    check_policy, classify_tokens, detect_proper_nouns, BlacklistedWindow, Finding, PolicyCode,
    PolicyConfig, PolicyReport, TokenClass,
};
pub use ranker::{
    attack_report, rank_passphrase, rank_words, unigram_permutation_estimate, AttackReport,
    AttackSummary, FoundSpan, Guess, GuessEstimate, HighCombiner, RankerConfig, SearchTrace,
    UnigramEstimate,
};
pub use report::{
    coverage_table, guessing_curve, phrase_dictionary_check, tolerance_audit, CoverageRow,
    CurvePoint, Estimator, KnownPhrases, ToleranceAuditRow,
};
pub use theory::{
    blacklist_mass, exhaustive_bits, guesswork_curve, join_count, marginal_guesswork,
    multiplier_bits, BlacklistMass, Composition, Distribution, Guesswork, GuessworkPoint,
    JoinCount, TheoryError,
};
