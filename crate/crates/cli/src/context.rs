use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context as _, Result};
use passguess_core::{
    load_store, normalize, NgramStore, NormalizedPhrase, PolicyConfig, RankerConfig,
    ToleranceConfig,
};

use crate::args::{Format, Global};
use crate::error::CliError;

pub struct Context {
    pub global: Global,
}

impl Context {
    pub fn new(global: Global) -> Self {
        Context { global }
    }

    pub fn store(&self) -> Result<NgramStore> {
        let dir = self.global.store.as_ref().ok_or(CliError::NoStore)?;
        load_store(dir).with_context(|| format!("loading store {}", dir.display()))
    }

    pub fn tolerance(&self) -> Result<ToleranceConfig> {
        match self.global.tolerance {
            None => Ok(ToleranceConfig::default()),
            Some(t) => ToleranceConfig::new(t)
                .map_err(|e| CliError::Usage(format!("--tolerance: {e}")).into()),
        }
    }

    pub fn blacklist_k(&self, store: &NgramStore) -> u64 {
        self.global
            .blacklist_k
            .unwrap_or_else(|| store.blacklist_k())
    }

    pub fn policy(&self, store: &NgramStore) -> PolicyConfig {
        PolicyConfig {
            blacklist_k: self.blacklist_k(store),
            ..PolicyConfig::default()
        }
    }

    pub fn ranker(&self) -> RankerConfig {
        RankerConfig {
            high_combiner: self
                .global
                .high_combiner
                .map(Into::into)
                .unwrap_or_default(),
            vocab_override: self.global.vocab_size,
            ..RankerConfig::default()
        }
    }

    /// The requested format, or `default`; fails when `allowed` excludes it.
    pub fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.global.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::Usage(
                format!("format {f:?} not supported by this command").to_lowercase(),
            )
            .into())
        }
    }
}

/// Opens a file, or stdin for `-`.
pub fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdin().lock()));
    }
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(Box::new(BufReader::new(file)))
}

pub fn stdout() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

/// Non-blank input lines with their one-based line numbers.
pub fn numbered_lines(reader: Box<dyn BufRead>) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(Ok((i + 1, l))),
            Err(e) => Some(Err(e.into())),
        })
}

pub fn write_json_line(out: &mut impl Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Name used for phrase input in error messages.
pub const INPUT: &str = "input";

/// Normalizes one input line; lines without letters or digits are a parse error.
pub fn parse_phrase(source: &str, line: usize, raw: &str) -> Result<NormalizedPhrase> {
    normalize(raw).map_err(|e| {
        CliError::Parse {
            source: source.to_owned(),
            line,
            message: e.to_string(),
        }
        .into()
    })
}
