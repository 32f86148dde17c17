//! Closed-form and table-driven guesswork estimators.

mod joins;

use std::io::BufRead;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::NgramStore;
use crate::ranker::log2_big;

pub use joins::{join_count, Composition, JoinCount};

/// Slack allowed when comparing accumulated floating-point mass.
pub const MASS_EPSILON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("alpha {0} outside (0, 1]")]
    BadAlpha(f64),
    #[error("invalid distribution: {0}")]
    BadDistribution(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{n}-gram table is empty")]
    EmptyTable { n: usize },
    #[error("invalid composition: {0}")]
    BadComposition(String),
    #[error("invalid argument: {0}")]
    BadArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Probabilities in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Sorts `probs` descending; each must lie in (0, 1] and the total may not
    /// exceed one (up to [`MASS_EPSILON`]).
    pub fn new(mut probs: Vec<f64>) -> Result<Distribution, TheoryError> {
        if let Some(p) = probs.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(TheoryError::BadDistribution(format!(
                "probability {p} outside (0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + MASS_EPSILON {
            return Err(TheoryError::BadDistribution(format!(
                "total mass {total} exceeds 1"
            )));
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(Distribution { probs })
    }

    pub fn uniform(n: usize) -> Distribution {
        Distribution {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Normalizes positive counts by their sum.
    pub fn from_frequencies(freqs: &[u64]) -> Result<Distribution, TheoryError> {
        if freqs.contains(&0) {
            return Err(TheoryError::BadDistribution("zero frequency".into()));
        }
        let total: u128 = freqs.iter().map(|&f| f as u128).sum();
        Distribution::new(freqs.iter().map(|&f| f as f64 / total as f64).collect())
    }

    /// Frequencies of table `n`, most frequent first, as fractions of the table total.
    pub fn from_table(store: &NgramStore, n: usize) -> Result<Distribution, TheoryError> {
        let table = store
            .table(n)
            .filter(|t| !t.is_empty())
            .ok_or(TheoryError::EmptyTable { n })?;
        let total = table.total_frequency() as f64;
        Ok(Distribution {
            probs: store
                .entries(n)
                .map(|e| e.frequency() as f64 / total)
                .collect(),
        })
    }

    /// Reads one value per line. Values are taken as probabilities when all
    /// are at most one and they sum to at most one; otherwise they are raw
    /// frequencies and get normalized. Blank lines and `#` comments are skipped.
    pub fn read(reader: impl BufRead) -> Result<Distribution, TheoryError> {
        let mut values = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let v: f64 = t.parse().map_err(|_| TheoryError::Parse {
                line: idx + 1,
                message: format!("not a number: {t:?}"),
            })?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(TheoryError::Parse {
                    line: idx + 1,
                    message: format!("value must be positive: {t}"),
                });
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(TheoryError::BadDistribution("no values".into()));
        }
        let total: f64 = values.iter().sum();
        if values.iter().all(|&v| v <= 1.0) && total <= 1.0 + MASS_EPSILON {
            Distribution::new(values)
        } else {
            Distribution::new(values.into_iter().map(|v| v / total).collect())
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "guesses")]
pub enum Guesswork {
    /// One-based number of top guesses needed.
    Index(usize),
    /// The distribution never accumulates enough mass.
    Unreachable,
}

/// Smallest `i` such that the top `i` probabilities sum to at least `alpha`.
pub fn marginal_guesswork(dist: &Distribution, alpha: f64) -> Result<Guesswork, TheoryError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(TheoryError::BadAlpha(alpha));
    }
    let mut mass = 0.0;
    for (i, p) in dist.probs.iter().enumerate() {
        mass += p;
        if mass + MASS_EPSILON >= alpha {
            return Ok(Guesswork::Index(i + 1));
        }
    }
    Ok(Guesswork::Unreachable)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GuessworkPoint {
    pub index: usize,
    pub cumulative_mass: f64,
    pub log2_index: f64,
}

/// Cumulative mass after every `stride`-th guess, always including the last.
pub fn guesswork_curve(dist: &Distribution, stride: usize) -> Vec<GuessworkPoint> {
    let stride = stride.max(1);
    let mut out = Vec::with_capacity(dist.len() / stride + 1);
    let mut mass = 0.0;
    for (i, p) in dist.probs.iter().enumerate() {
        mass += p;
        let index = i + 1;
        if index % stride == 0 || index == dist.len() {
            out.push(GuessworkPoint {
                index,
                cumulative_mass: mass,
                log2_index: (index as f64).log2(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlacklistMass {
    pub mass_top_m: f64,
    pub mass_top_m_after_removing_top_k: f64,
}

/// Probability mass of the `m` most frequent entries of table `n`, before and
/// after removing every entry ranked at most `top_k`.
///
/// Both values share the full-table denominator unless `renormalize` is set,
/// in which case the second is taken over the mass that remains after removal.
pub fn blacklist_mass(
    store: &NgramStore,
    n: usize,
    top_k: u64,
    m: usize,
    renormalize: bool,
) -> Result<BlacklistMass, TheoryError> {
    let table = store
        .table(n)
        .filter(|t| !t.is_empty())
        .ok_or(TheoryError::EmptyTable { n })?;
    let total = table.total_frequency();
    let top: u128 = store
        .entries(n)
        .take(m)
        .map(|e| e.frequency() as u128)
        .sum();
    let removed: u128 = store
        .entries(n)
        .take_while(|e| e.rank() <= top_k)
        .map(|e| e.frequency() as u128)
        .sum();
    let kept: u128 = store
        .entries(n)
        .filter(|e| e.rank() > top_k)
        .take(m)
        .map(|e| e.frequency() as u128)
        .sum();
    let after_denominator = if renormalize { total - removed } else { total };
    Ok(BlacklistMass {
        mass_top_m: top as f64 / total as f64,
        mass_top_m_after_removing_top_k: if after_denominator == 0 {
            0.0
        } else {
            kept as f64 / after_denominator as f64
        },
    })
}

/// Bits of a uniform search over `alphabet` symbols at the given (possibly
/// fractional, i.e. average) length.
pub fn exhaustive_bits(alphabet: u64, length: f64) -> Result<f64, TheoryError> {
    if alphabet < 2 {
        return Err(TheoryError::BadArgument(format!(
            "alphabet size {alphabet} below 2"
        )));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(TheoryError::BadArgument(format!(
            "length {length} must be positive"
        )));
    }
    Ok(length * (alphabet as f64).log2())
}

/// Bits after substituting each of `lexicon` words into `base` candidates.
pub fn multiplier_bits(base: &BigUint, lexicon: u64) -> Result<f64, TheoryError> {
    if *base == BigUint::ZERO || lexicon == 0 {
        return Err(TheoryError::BadArgument("counts must be at least 1".into()));
    }
    Ok(log2_big(&(base * BigUint::from(lexicon))))
}
