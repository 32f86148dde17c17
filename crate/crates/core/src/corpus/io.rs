//! Store directory layout:
//!
//! ```text
//! 1gram.tsv .. 5gram.tsv   frequency<TAB>w1<TAB>..<TAB>wn, any order
//! proper_nouns.txt         one token per line
//! slang.txt                one token per line
//! meta.json                {"blacklistK", "caps", "counts", ...}
//! ```

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CorpusError, NgramStore, StoreBuilder, StoreConfig, DEFAULT_BLACKLIST_K, MAX_N};
use crate::matching::{normalize, normalize_word};

const META: &str = "meta.json";
const PROPER_NOUNS: &str = "proper_nouns.txt";
const SLANG: &str = "slang.txt";

fn table_file(n: usize) -> String {
    format!("{n}gram.tsv")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Meta {
    #[serde(rename = "blacklistK", default = "default_k")]
    blacklist_k: u64,
    #[serde(default)]
    caps: BTreeMap<usize, usize>,
    #[serde(default)]
    counts: BTreeMap<usize, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    total_tokens: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lexicon_size_override: Option<u64>,
}

fn default_k() -> u64 {
    DEFAULT_BLACKLIST_K
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Loads a store written by [`save_store`] or assembled by hand.
///
/// `meta.json` must exist; missing table or lexicon files load as empty.
pub fn load_store(dir: impl AsRef<Path>) -> Result<NgramStore, CorpusError> {
    let dir = dir.as_ref();
    let meta_path = dir.join(META);
    if !meta_path.is_file() {
        return Err(CorpusError::StoreMissing(dir.to_path_buf()));
    }
    let raw = std::fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
    let meta: Meta =
        serde_json::from_str(&raw).map_err(|e| parse_err(&meta_path, e.line(), e.to_string()))?;
    if let Some(&n) = meta.caps.keys().find(|n| !(1..=MAX_N).contains(*n)) {
        return Err(parse_err(
            &meta_path,
            0,
            format!("cap for unknown table {n}"),
        ));
    }

    let mut builder = NgramStore::builder().config(StoreConfig {
        blacklist_k: meta.blacklist_k,
        caps: meta.caps,
        lexicon_size_override: meta.lexicon_size_override,
    });
    if let Some(t) = meta.total_tokens {
        builder = builder.total_tokens(t);
    }
    for n in 1..=MAX_N {
        let path = dir.join(table_file(n));
        if path.is_file() {
            read_table(&path, n, &mut builder)?;
        }
    }
    let path = dir.join(PROPER_NOUNS);
    for word in read_lexicon(&path)? {
        builder.add_proper_noun(&word)?;
    }
    let path = dir.join(SLANG);
    for word in read_lexicon(&path)? {
        builder.add_slang(&word)?;
    }
    Ok(builder.build())
}

fn read_table(path: &Path, n: usize, builder: &mut StoreBuilder) -> Result<(), CorpusError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut words = Vec::with_capacity(n);
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let freq = fields.next().unwrap_or_default();
        let freq: u64 = freq
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad frequency {freq:?}")))?;
        if freq == 0 {
            return Err(parse_err(path, lineno, "frequency must be at least 1"));
        }
        words.clear();
        for field in fields {
            if field.chars().any(char::is_whitespace) {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("word {field:?} contains whitespace"),
                ));
            }
            let word = normalize_word(field);
            if word.is_empty() {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("word {field:?} is empty after normalization"),
                ));
            }
            words.push(word);
        }
        if words.len() != n {
            return Err(parse_err(
                path,
                lineno,
                format!("expected {n} words, found {}", words.len()),
            ));
        }
        builder
            .add(&words, freq)
            .map_err(|e| parse_err(path, lineno, e.to_string()))?;
    }
    Ok(())
}

/// Reads a one-token-per-line lexicon. A missing file is an empty lexicon.
pub fn read_lexicon(path: &Path) -> Result<Vec<String>, CorpusError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let phrase = normalize(&line)
            .map_err(|_| parse_err(path, idx + 1, "entry has no letters or digits"))?;
        if phrase.word_count() != 1 {
            return Err(parse_err(
                path,
                idx + 1,
                "lexicon entries must be single words",
            ));
        }
        out.push(String::from(phrase));
    }
    Ok(out)
}

/// Writes the store so that [`load_store`] reproduces it exactly.
pub fn save_store(store: &NgramStore, dir: impl AsRef<Path>) -> Result<(), CorpusError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;

    for n in 1..=MAX_N {
        let path = dir.join(table_file(n));
        let mut out = writer(&path)?;
        for entry in store.entries(n) {
            let mut line = entry.frequency().to_string();
            for w in entry.words() {
                line.push('\t');
                line.push_str(w);
            }
            line.push('\n');
            out.write_all(line.as_bytes()).map_err(io_err(&path))?;
        }
        out.flush().map_err(io_err(&path))?;
    }
    write_lexicon(&dir.join(PROPER_NOUNS), store.proper_nouns().iter())?;
    write_lexicon(&dir.join(SLANG), store.slang_terms().iter())?;

    let config = store.config();
    let meta = Meta {
        blacklist_k: config.blacklist_k,
        caps: config.caps.clone(),
        counts: (1..=MAX_N).map(|n| (n, store.counts()[n - 1])).collect(),
        total_tokens: store.total_tokens(),
        lexicon_size_override: config.lexicon_size_override,
    };
    let path = dir.join(META);
    let json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    std::fs::write(&path, json + "\n").map_err(io_err(&path))
}

fn writer(path: &PathBuf) -> Result<BufWriter<File>, CorpusError> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn write_lexicon<'a>(
    path: &PathBuf,
    words: impl Iterator<Item = &'a String>,
) -> Result<(), CorpusError> {
    let mut out = writer(path)?;
    for w in words {
        writeln!(out, "{w}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}
