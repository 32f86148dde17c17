use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{Serialize, Serializer};

/// Marker used in serialized records for phrases the model cannot reach.
pub const NOT_GUESSABLE: &str = "not_guessable";

/// A guess-number, or the statement that the model never produces the phrase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guess {
    Guessable(BigUint),
    NotGuessable,
}

impl Guess {
    pub fn is_guessable(&self) -> bool {
        matches!(self, Guess::Guessable(_))
    }

    pub fn value(&self) -> Option<&BigUint> {
        match self {
            Guess::Guessable(v) => Some(v),
            Guess::NotGuessable => None,
        }
    }

    /// log2 of the guess-number, `None` when not guessable.
    pub fn bits(&self) -> Option<f64> {
        self.value().map(log2_big)
    }
}

impl fmt::Display for Guess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guess::Guessable(v) => write!(f, "{v}"),
            Guess::NotGuessable => f.write_str(NOT_GUESSABLE),
        }
    }
}

impl Serialize for Guess {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl From<u64> for Guess {
    fn from(v: u64) -> Self {
        Guess::Guessable(BigUint::from(v))
    }
}

/// log2 of an arbitrary-precision integer using its top 64 bits.
/// Returns negative infinity for zero.
pub fn log2_big(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 64 {
        return (v.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

pub(crate) fn product(values: &[u64]) -> BigUint {
    values
        .iter()
        .fold(BigUint::one(), |acc, &v| acc * BigUint::from(v))
}
