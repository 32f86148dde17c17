#![allow(dead_code)]

pub mod hand_model;

use std::collections::{BTreeMap, HashMap};

use passguess_core::NgramStore;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use hand_model::Gram;

pub fn vocab(size: usize) -> Vec<String> {
    (0..size).map(|i| format!("w{i}")).collect()
}

/// Distinct n-grams over `vocab`, sizes drawn from `sizes`, small frequencies
/// so that ties are common.
pub fn random_grams(
    rng: &mut StdRng,
    vocab: &[String],
    count: usize,
    sizes: &[usize],
) -> Vec<Gram> {
    let mut seen: BTreeMap<Vec<String>, u64> = BTreeMap::new();
    for _ in 0..count {
        let n = *sizes.choose(rng).unwrap();
        let key: Vec<String> = (0..n).map(|_| vocab.choose(rng).unwrap().clone()).collect();
        let freq = rng.gen_range(1..=12);
        seen.entry(key).or_insert(freq);
    }
    seen.into_iter().collect()
}

pub fn build_store(grams: &[Gram]) -> NgramStore {
    let mut b = NgramStore::builder();
    for (words, f) in grams {
        b.add(words, *f).unwrap();
    }
    b.build()
}

/// A phrase stitched from stored n-grams and loose vocabulary words.
pub fn random_phrase(rng: &mut StdRng, vocab: &[String], grams: &[Gram]) -> Vec<String> {
    let len = rng.gen_range(7..=10);
    let mut out: Vec<String> = Vec::new();
    while out.len() < len {
        if !grams.is_empty() && rng.gen_bool(0.6) {
            out.extend(grams.choose(rng).unwrap().0.iter().cloned());
        } else {
            out.push(vocab.choose(rng).unwrap().clone());
        }
    }
    out.truncate(len);
    out
}

/// Counts chains by enumerating every sequence explicitly.
pub fn enumerate_joins(grams: &[Gram], parts: &[usize]) -> u64 {
    let mut by_size: HashMap<usize, Vec<&Vec<String>>> = HashMap::new();
    for (w, _) in grams {
        by_size.entry(w.len()).or_default().push(w);
    }
    let mut sequences: Vec<Vec<String>> = vec![Vec::new()];
    for (idx, n) in parts.iter().enumerate() {
        let mut next = Vec::new();
        for seq in &sequences {
            for g in by_size.get(n).map(Vec::as_slice).unwrap_or(&[]) {
                if idx == 0 {
                    next.push((*g).clone());
                } else if seq.last() == g.first() {
                    let mut s = seq.clone();
                    s.extend(g[1..].iter().cloned());
                    next.push(s);
                }
            }
        }
        sequences = next;
    }
    sequences.len() as u64
}

/// Edit distance by memoized recursion over suffixes.
pub fn recursive_levenshtein(a: &str, b: &str) -> usize {
    fn go(a: &[char], b: &[char], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if a.is_empty() {
            return b.len();
        }
        if b.is_empty() {
            return a.len();
        }
        if let Some(&d) = memo.get(&(a.len(), b.len())) {
            return d;
        }
        let cost = usize::from(a[0] != b[0]);
        let d = (go(&a[1..], &b[1..], memo) + cost)
            .min(go(&a[1..], b, memo) + 1)
            .min(go(a, &b[1..], memo) + 1);
        memo.insert((a.len(), b.len()), d);
        d
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    go(&a, &b, &mut HashMap::new())
}
