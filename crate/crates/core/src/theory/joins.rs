use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;

use super::TheoryError;
use crate::corpus::{NgramStore, MAX_N};
use crate::ranker::log2_big;

/// N-gram sizes chained left to right, neighbours sharing one word.
///
/// `[5, 3]` spans 5 + 3 - 1 = 7 words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Composition, TheoryError> {
        if parts.is_empty() {
            return Err(TheoryError::BadComposition("no parts".into()));
        }
        if let Some(p) = parts.iter().find(|p| !(1..=MAX_N).contains(*p)) {
            return Err(TheoryError::BadComposition(format!(
                "part {p} outside 1..={MAX_N}"
            )));
        }
        if parts.len() > 1 && parts.contains(&1) {
            // a 1-gram sharing its only word contributes nothing new
            return Err(TheoryError::BadComposition(
                "1-grams cannot be joined".into(),
            ));
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn word_count(&self) -> usize {
        self.0.iter().sum::<usize>() + 1 - self.0.len()
    }
}

impl FromStr for Composition {
    type Err = TheoryError;

    /// Accepts `5+3` or `5,3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(['+', ','])
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| TheoryError::BadComposition(format!("bad part {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Composition::new(parts)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join("+"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JoinCount {
    pub composition: String,
    pub word_count: usize,
    #[serde(serialize_with = "serialize_decimal")]
    pub count: BigUint,
    /// `None` when no chain exists.
    pub bits: Option<f64>,
}

fn serialize_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Number of distinct word sequences built by chaining entries of the given
/// tables, each entry's first word equal to the previous entry's last word.
///
/// The count is folded over a histogram of chain end-words, so the cost is
/// linear in the total size of the tables involved.
pub fn join_count(store: &NgramStore, composition: &Composition) -> Result<JoinCount, TheoryError> {
    for &n in composition.parts() {
        if store.table(n).is_none_or(|t| t.is_empty()) {
            return Err(TheoryError::EmptyTable { n });
        }
    }
    let parts = composition.parts();
    let first = store.table(parts[0]).expect("checked above");

    let mut ends: HashMap<u32, BigUint> = HashMap::new();
    for pos in 0..first.len() {
        let last = *first.key_ids(pos).last().expect("non-empty key");
        *ends.entry(last).or_default() += 1u32;
    }
    for &n in &parts[1..] {
        let table = store.table(n).expect("checked above");
        let mut next: HashMap<u32, BigUint> = HashMap::new();
        for pos in 0..table.len() {
            let ids = table.key_ids(pos);
            if let Some(c) = ends.get(&ids[0]) {
                *next.entry(ids[n - 1]).or_default() += c;
            }
        }
        ends = next;
    }

    let count: BigUint = ends.into_values().sum();
    let bits = (count != BigUint::ZERO).then(|| log2_big(&count));
    Ok(JoinCount {
        composition: composition.to_string(),
        word_count: composition.word_count(),
        count,
        bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entries(store: &NgramStore, n: usize) -> Vec<Vec<String>> {
        store
            .entries(n)
            .map(|e| e.words().map(str::to_string).collect())
            .collect()
    }

    /// Depth-first enumeration of every chain.
    fn brute_force(store: &NgramStore, parts: &[usize]) -> u64 {
        fn go(store: &NgramStore, parts: &[usize], tail: Option<&str>) -> u64 {
            let Some((&n, rest)) = parts.split_first() else {
                return 1;
            };
            entries(store, n)
                .iter()
                .filter(|e| tail.is_none_or(|t| e[0] == t))
                .map(|e| go(store, rest, Some(&e[n - 1])))
                .sum()
        }
        go(store, parts, None)
    }

    fn toy() -> NgramStore {
        NgramStore::builder()
            .ngram("a b", 5)
            .ngram("b c", 4)
            .ngram("b a", 3)
            .ngram("c a", 2)
            .ngram("a b c", 3)
            .ngram("c a b", 2)
            .ngram("b c a", 1)
            .build()
    }

    #[test]
    fn toy_counts() {
        let s = toy();
        let c = |p: &str| join_count(&s, &p.parse().unwrap()).unwrap().count;
        assert_eq!(c("2"), BigUint::from(4u32));
        // a b|b c, a b|b a, b c|c a, b a|a b, c a|a b
        assert_eq!(c("2+2"), BigUint::from(5u32));
        assert_eq!(c("3,2"), BigUint::from(4u32));
        let j = join_count(&s, &"3+3+2".parse().unwrap()).unwrap();
        assert_eq!(j.word_count, 6);
        assert_eq!(j.composition, "3+3+2");
    }

    #[test]
    fn empty_and_unjoinable() {
        let s = NgramStore::builder()
            .ngram("a b", 1)
            .ngram("c d", 1)
            .build();
        let j = join_count(&s, &"2+2".parse().unwrap()).unwrap();
        assert_eq!(j.count, BigUint::ZERO);
        assert_eq!(j.bits, None);
        assert!(matches!(
            join_count(&s, &"2+3".parse().unwrap()),
            Err(TheoryError::EmptyTable { n: 3 })
        ));
    }

    #[test]
    fn composition_parsing() {
        assert_eq!("5+3".parse::<Composition>().unwrap().word_count(), 7);
        assert_eq!(
            "2,2,2,2,2,2".parse::<Composition>().unwrap().word_count(),
            7
        );
        assert!("".parse::<Composition>().is_err());
        assert!("6".parse::<Composition>().is_err());
        assert!("0+2".parse::<Composition>().is_err());
        assert!("2+1".parse::<Composition>().is_err());
        assert!("x".parse::<Composition>().is_err());
    }

    fn arb_store() -> impl Strategy<Value = NgramStore> {
        let gram = (2usize..=4)
            .prop_flat_map(|n| (Just(n), proptest::collection::vec(0u8..5, n), 1u64..20));
        proptest::collection::vec(gram, 1..60).prop_map(|grams| {
            let mut b = NgramStore::builder();
            for (_, ws, f) in grams {
                let words: Vec<String> = ws.iter().map(|w| format!("w{w}")).collect();
                b.add(&words, f).unwrap();
            }
            b.build()
        })
    }

    fn reversed(store: &NgramStore) -> NgramStore {
        let mut b = NgramStore::builder();
        for n in 1..=MAX_N {
            for e in store.entries(n) {
                let mut w: Vec<&str> = e.words().collect();
                w.reverse();
                b.add(&w, e.frequency()).unwrap();
            }
        }
        b.build()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fold_matches_enumeration(
            store in arb_store(),
            parts in proptest::collection::vec(2usize..=4, 1..4),
        ) {
            let comp = Composition::new(parts.clone()).unwrap();
            match join_count(&store, &comp) {
                Ok(j) => prop_assert_eq!(j.count, BigUint::from(brute_force(&store, &parts))),
                Err(TheoryError::EmptyTable { n }) => prop_assert!(store.table(n).unwrap().is_empty()),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn reversal_symmetry(
            store in arb_store(),
            parts in proptest::collection::vec(2usize..=4, 1..4),
        ) {
            let comp = Composition::new(parts.clone()).unwrap();
            let mut rev_parts = parts;
            rev_parts.reverse();
            let rev = Composition::new(rev_parts).unwrap();
            let a = join_count(&store, &comp).ok().map(|j| j.count);
            let b = join_count(&reversed(&store), &rev).ok().map(|j| j.count);
            prop_assert_eq!(a, b);
        }
    }
}
