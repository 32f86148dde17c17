use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{
    competition_ranks, CorpusError, CorpusStats, NgramCounts, NgramKey, RankedNgram, Token,
    DEFAULT_BLACKLIST_K, MAX_N,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StoreConfig {
    #[serde(rename = "blacklistK")]
    pub blacklist_k: u64,
    /// Maximum retained entries per table, keyed by n. Truncation keeps the
    /// most frequent entries and does not renumber ranks.
    #[serde(default)]
    pub caps: BTreeMap<usize, usize>,
    /// Replaces the number of distinct 1-grams in permutation estimates.
    #[serde(default)]
    pub lexicon_size_override: Option<u64>,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            blacklist_k: DEFAULT_BLACKLIST_K,
            caps: BTreeMap::new(),
            lexicon_size_override: None,
        }
    }
}

/// One slot of a lookup pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot<'a> {
    Word(&'a str),
    Any,
}

#[derive(Debug, Default)]
struct Vocab {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocab {
    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_owned());
        self.ids.insert(word.to_owned(), id);
        id
    }

    fn id(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }
}

/// Entries of one n, in frequency order, with exact and per-slot indexes.
#[derive(Debug)]
pub struct NgramTable {
    n: usize,
    keys: Vec<u32>,
    freqs: Vec<u64>,
    ranks: Vec<u64>,
    exact: HashMap<Box<[u32]>, u32>,
    // slot -> word id -> ascending entry positions
    postings: Vec<HashMap<u32, Vec<u32>>>,
}

impl NgramTable {
    fn empty(n: usize) -> Self {
        NgramTable {
            n,
            keys: Vec::new(),
            freqs: Vec::new(),
            ranks: Vec::new(),
            exact: HashMap::new(),
            postings: vec![HashMap::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Largest rank in the table, zero when empty.
    pub fn max_rank(&self) -> u64 {
        self.ranks.last().copied().unwrap_or(0)
    }

    pub fn total_frequency(&self) -> u128 {
        self.freqs.iter().map(|&f| f as u128).sum()
    }

    pub(crate) fn key_ids(&self, pos: usize) -> &[u32] {
        &self.keys[pos * self.n..(pos + 1) * self.n]
    }

    pub(crate) fn frequency_at(&self, pos: usize) -> u64 {
        self.freqs[pos]
    }

    pub(crate) fn rank_at(&self, pos: usize) -> u64 {
        self.ranks[pos]
    }

    pub(crate) fn position_of(&self, ids: &[u32]) -> Option<usize> {
        self.exact.get(ids).map(|&p| p as usize)
    }

    /// Positions agreeing on every fixed slot, in table order.
    pub(crate) fn matching_positions(&self, pattern: &[Option<u32>]) -> Vec<usize> {
        debug_assert_eq!(pattern.len(), self.n);
        if pattern.iter().all(Option::is_some) {
            let ids: Vec<u32> = pattern.iter().map(|s| s.unwrap()).collect();
            return self.position_of(&ids).into_iter().collect();
        }
        let mut best: Option<&Vec<u32>> = None;
        for (slot, fixed) in pattern.iter().enumerate() {
            if let Some(id) = fixed {
                match self.postings[slot].get(id) {
                    None => return Vec::new(),
                    Some(list) => {
                        if best.is_none_or(|b| list.len() < b.len()) {
                            best = Some(list);
                        }
                    }
                }
            }
        }
        let Some(candidates) = best else {
            return (0..self.len()).collect();
        };
        candidates
            .iter()
            .map(|&p| p as usize)
            .filter(|&p| {
                self.key_ids(p)
                    .iter()
                    .zip(pattern)
                    .all(|(id, fixed)| fixed.is_none_or(|f| f == *id))
            })
            .collect()
    }
}

/// Ranked n-gram tables for n = 1..=5 plus proper-noun and slang lexicons.
///
/// Immutable once built; share it behind an `Arc` for concurrent readers.
#[derive(Debug)]
pub struct NgramStore {
    vocab: Vocab,
    tables: Vec<NgramTable>,
    proper_nouns: BTreeSet<String>,
    slang: BTreeSet<String>,
    config: StoreConfig,
    total_tokens: Option<u64>,
}

/// Read-only view of one stored n-gram.
#[derive(Clone, Copy)]
pub struct NgramEntry<'a> {
    store: &'a NgramStore,
    table: &'a NgramTable,
    pos: usize,
}

impl<'a> NgramEntry<'a> {
    pub fn words(&self) -> impl Iterator<Item = &'a str> + 'a {
        let store = self.store;
        self.table
            .key_ids(self.pos)
            .iter()
            .map(move |&id| store.vocab.word(id))
    }

    pub fn first_word(&self) -> &'a str {
        self.store.vocab.word(self.table.key_ids(self.pos)[0])
    }

    pub fn last_word(&self) -> &'a str {
        self.store
            .vocab
            .word(*self.table.key_ids(self.pos).last().unwrap())
    }

    pub fn frequency(&self) -> u64 {
        self.table.frequency_at(self.pos)
    }

    pub fn rank(&self) -> u64 {
        self.table.rank_at(self.pos)
    }

    /// Zero-based position in the table's frequency order.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn to_ranked(&self) -> RankedNgram {
        RankedNgram {
            key: NgramKey(self.words().map(|w| Token(w.to_owned())).collect()),
            frequency: self.frequency(),
            rank: self.rank(),
        }
    }
}

impl std::fmt::Debug for NgramEntry<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NgramEntry")
            .field("words", &self.words().collect::<Vec<_>>())
            .field("frequency", &self.frequency())
            .field("rank", &self.rank())
            .finish()
    }
}

impl NgramStore {
    pub fn builder() -> StoreBuilder {
        StoreBuilder::default()
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    pub fn blacklist_k(&self) -> u64 {
        self.config.blacklist_k
    }

    pub fn total_tokens(&self) -> Option<u64> {
        self.total_tokens
    }

    /// Table for n-grams of length `n` (1..=5).
    pub fn table(&self, n: usize) -> Option<&NgramTable> {
        n.checked_sub(1).and_then(|i| self.tables.get(i))
    }

    pub fn max_rank(&self, n: usize) -> u64 {
        self.table(n).map_or(0, NgramTable::max_rank)
    }

    pub fn entries(&self, n: usize) -> impl Iterator<Item = NgramEntry<'_>> + '_ {
        let len = self.table(n).map_or(0, NgramTable::len);
        (0..len).map(move |pos| self.entry(n, pos))
    }

    pub fn counts(&self) -> [u64; MAX_N] {
        let mut out = [0u64; MAX_N];
        for (i, t) in self.tables.iter().enumerate() {
            out[i] = t.len() as u64;
        }
        out
    }

    pub fn stats(&self) -> CorpusStats {
        CorpusStats {
            counts: self.counts(),
            total_tokens: self.total_tokens.unwrap_or(0),
        }
    }

    /// Vocabulary size used by permutation estimates.
    pub fn lexicon_size(&self) -> u64 {
        self.config
            .lexicon_size_override
            .unwrap_or(self.tables[0].len() as u64)
    }

    pub fn in_lexicon(&self, word: &str) -> bool {
        self.word_id(word)
            .is_some_and(|id| self.tables[0].position_of(&[id]).is_some())
    }

    pub fn is_proper_noun(&self, word: &str) -> bool {
        self.proper_nouns.contains(word)
    }

    pub fn is_slang(&self, word: &str) -> bool {
        self.slang.contains(word)
    }

    pub fn proper_nouns(&self) -> &BTreeSet<String> {
        &self.proper_nouns
    }

    pub fn slang_terms(&self) -> &BTreeSet<String> {
        &self.slang
    }

    pub(crate) fn word_id(&self, word: &str) -> Option<u32> {
        self.vocab.id(word)
    }

    fn entry(&self, n: usize, pos: usize) -> NgramEntry<'_> {
        NgramEntry {
            store: self,
            table: &self.tables[n - 1],
            pos,
        }
    }

    fn ids<S: AsRef<str>>(&self, words: &[S]) -> Option<Vec<u32>> {
        words.iter().map(|w| self.word_id(w.as_ref())).collect()
    }

    pub fn get<S: AsRef<str>>(&self, words: &[S]) -> Option<NgramEntry<'_>> {
        let table = self.table(words.len())?;
        let ids = self.ids(words)?;
        table
            .position_of(&ids)
            .map(|pos| self.entry(words.len(), pos))
    }

    pub fn rank_of<S: AsRef<str>>(&self, words: &[S]) -> Option<u64> {
        self.get(words).map(|e| e.rank())
    }

    /// Entries agreeing with every fixed slot, most frequent first.
    pub fn lookup(&self, pattern: &[Slot<'_>]) -> Result<Vec<RankedNgram>, CorpusError> {
        Ok(self
            .lookup_entries(pattern)?
            .iter()
            .map(NgramEntry::to_ranked)
            .collect())
    }

    pub fn lookup_entries(&self, pattern: &[Slot<'_>]) -> Result<Vec<NgramEntry<'_>>, CorpusError> {
        if pattern.is_empty() || pattern.len() > MAX_N {
            return Err(CorpusError::BadArity(pattern.len()));
        }
        if pattern.iter().all(|s| matches!(s, Slot::Any)) {
            return Err(CorpusError::BadPattern("at least one slot must be a word"));
        }
        let mut ids = Vec::with_capacity(pattern.len());
        for slot in pattern {
            match slot {
                Slot::Any => ids.push(None),
                Slot::Word(w) => match self.word_id(w) {
                    Some(id) => ids.push(Some(id)),
                    None => return Ok(Vec::new()),
                },
            }
        }
        let table = &self.tables[pattern.len() - 1];
        Ok(table
            .matching_positions(&ids)
            .into_iter()
            .map(|pos| self.entry(pattern.len(), pos))
            .collect())
    }

    /// True when `words` (3..=5 long) is stored with rank at most the store's cutoff.
    pub fn is_blacklisted<S: AsRef<str>>(&self, words: &[S]) -> bool {
        self.blacklisted_rank(words, self.config.blacklist_k)
            .is_some()
    }

    /// Rank of `words` when it falls inside the top `k`; `None` otherwise or
    /// when the length is outside 3..=5.
    pub fn blacklisted_rank<S: AsRef<str>>(&self, words: &[S], k: u64) -> Option<u64> {
        if !(3..=MAX_N).contains(&words.len()) {
            return None;
        }
        self.rank_with_cutoff(words, k)
    }

    /// Rank of `words` when it is at most `k`, for any length.
    pub fn rank_with_cutoff<S: AsRef<str>>(&self, words: &[S], k: u64) -> Option<u64> {
        self.rank_of(words).filter(|&r| r <= k)
    }

    /// Entries of table `n` that survive blacklisting, with their original ranks.
    pub fn blacklist_survivors(&self, n: usize) -> impl Iterator<Item = NgramEntry<'_>> + '_ {
        let k = self.config.blacklist_k;
        self.entries(n).filter(move |e| e.rank() > k)
    }
}

impl PartialEq for NgramStore {
    fn eq(&self, other: &Self) -> bool {
        if self.config != other.config
            || self.total_tokens != other.total_tokens
            || self.proper_nouns != other.proper_nouns
            || self.slang != other.slang
        {
            return false;
        }
        (1..=MAX_N).all(|n| {
            self.max_rank(n) == other.max_rank(n)
                && self.entries(n).count() == other.entries(n).count()
                && self.entries(n).zip(other.entries(n)).all(|(a, b)| {
                    a.frequency() == b.frequency()
                        && a.rank() == b.rank()
                        && a.words().eq(b.words())
                })
        })
    }
}

/// Accumulates frequencies and lexicons, then freezes them into a store.
#[derive(Debug, Default)]
pub struct StoreBuilder {
    counts: [HashMap<Vec<String>, u64>; MAX_N],
    proper_nouns: BTreeSet<String>,
    slang: BTreeSet<String>,
    config: StoreConfig,
    total_tokens: Option<u64>,
}

impl StoreBuilder {
    pub fn config(mut self, config: StoreConfig) -> Self {
        self.config = config;
        self
    }

    pub fn blacklist_k(mut self, k: u64) -> Self {
        self.config.blacklist_k = k;
        self
    }

    pub fn total_tokens(mut self, total: u64) -> Self {
        self.total_tokens = Some(total);
        self
    }

    /// Adds `frequency` occurrences of `words`; repeated keys accumulate.
    pub fn add<S: AsRef<str>>(&mut self, words: &[S], frequency: u64) -> Result<(), CorpusError> {
        if words.is_empty() || words.len() > MAX_N {
            return Err(CorpusError::BadArity(words.len()));
        }
        let key = words
            .iter()
            .map(|w| Token::new(w.as_ref()).map(String::from))
            .collect::<Result<Vec<_>, _>>()?;
        *self.counts[words.len() - 1].entry(key).or_insert(0) += frequency;
        Ok(())
    }

    /// Chaining form of [`StoreBuilder::add`] taking a space-separated phrase.
    ///
    /// # Panics
    /// When the phrase is not 1..=5 normalized words.
    pub fn ngram(mut self, words: &str, frequency: u64) -> Self {
        let words: Vec<&str> = words.split(' ').collect();
        self.add(&words, frequency).expect("invalid n-gram");
        self
    }

    pub fn add_counts(&mut self, counts: NgramCounts) {
        self.total_tokens = Some(self.total_tokens.unwrap_or(0) + counts.total_tokens());
        for (i, table) in counts.into_tables().into_iter().enumerate() {
            for (key, f) in table {
                let key: Vec<String> = key.0.into_iter().map(String::from).collect();
                *self.counts[i].entry(key).or_insert(0) += f;
            }
        }
    }

    pub fn add_proper_noun(&mut self, word: &str) -> Result<(), CorpusError> {
        self.proper_nouns.insert(Token::new(word)?.into());
        Ok(())
    }

    pub fn add_slang(&mut self, word: &str) -> Result<(), CorpusError> {
        self.slang.insert(Token::new(word)?.into());
        Ok(())
    }

    pub fn proper_noun(mut self, word: &str) -> Self {
        self.add_proper_noun(word).expect("invalid token");
        self
    }

    pub fn slang(mut self, word: &str) -> Self {
        self.add_slang(word).expect("invalid token");
        self
    }

    pub fn build(self) -> NgramStore {
        let mut vocab = Vocab::default();
        let mut tables = Vec::with_capacity(MAX_N);
        for (i, counts) in self.counts.into_iter().enumerate() {
            let n = i + 1;
            let mut entries: Vec<(Vec<String>, u64)> =
                counts.into_iter().filter(|(_, f)| *f > 0).collect();
            entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            if let Some(&cap) = self.config.caps.get(&n) {
                entries.truncate(cap);
            }
            let ranks = competition_ranks(entries.iter().map(|e| e.1));
            let mut table = NgramTable::empty(n);
            table.keys.reserve(entries.len() * n);
            for (pos, ((words, freq), rank)) in entries.into_iter().zip(ranks).enumerate() {
                let ids: Box<[u32]> = words.iter().map(|w| vocab.intern(w)).collect();
                for (slot, &id) in ids.iter().enumerate() {
                    table.postings[slot].entry(id).or_default().push(pos as u32);
                }
                table.keys.extend_from_slice(&ids);
                table.exact.insert(ids, pos as u32);
                table.freqs.push(freq);
                table.ranks.push(rank);
            }
            tables.push(table);
        }
        NgramStore {
            vocab,
            tables,
            proper_nouns: self.proper_nouns,
            slang: self.slang,
            config: self.config,
            total_tokens: self.total_tokens,
        }
    }
}
