//! Slow, literal re-implementation of the n-gram ranking walk used to
//! cross-check the library. Tables are plain vectors scanned in full on every
//! lookup; ranks are recomputed from scratch each time they are needed.

use num_bigint::BigUint;

pub type Gram = (Vec<String>, u64);

pub struct HandStore {
    /// `tables[n - 1]`, most frequent first, ties in key order.
    tables: Vec<Vec<Gram>>,
}

impl HandStore {
    pub fn new(grams: &[Gram]) -> HandStore {
        let mut tables: Vec<Vec<Gram>> = vec![Vec::new(); 5];
        for g in grams {
            tables[g.0.len() - 1].push(g.clone());
        }
        for t in &mut tables {
            t.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        }
        HandStore { tables }
    }

    fn table(&self, n: usize) -> &[Gram] {
        &self.tables[n - 1]
    }

    /// One plus the number of entries strictly more frequent.
    fn rank(&self, n: usize, freq: u64) -> u64 {
        1 + self.table(n).iter().filter(|g| g.1 > freq).count() as u64
    }

    fn max_rank(&self, n: usize) -> u64 {
        self.table(n)
            .iter()
            .map(|g| self.rank(n, g.1))
            .max()
            .unwrap_or(0)
    }
}

pub struct HandResult {
    pub low: Option<BigUint>,
    pub high: Option<BigUint>,
    pub score: Vec<u64>,
    pub score_not_found: Vec<u64>,
}

pub fn hand_rank(store: &HandStore, phrase: &[String]) -> HandResult {
    let len = phrase.len();
    let mut found = vec![false; len];
    let mut score = Vec::new();
    let mut not_found = Vec::new();

    for n in (1..=5).rev() {
        if n > len {
            continue;
        }
        for i in 0..=len - n {
            let unfound = |a: usize, b: usize| (a..b).all(|k| !found[k]);

            // decide the window and whether one of its words is already known
            let (start, anchored) = if n > 1 && found[i] && unfound(i + 1, i + n) {
                (i, true)
            } else if n > 1 && unfound(i, i + n) && i + n < len && found[i + n] {
                (i + 1, true)
            } else if unfound(i, i + n) {
                (i, false)
            } else {
                continue;
            };
            let table = store.table(n);
            if table.is_empty() {
                continue;
            }
            let window = &phrase[start..start + n];

            let mut candidates: Vec<&Gram> = Vec::new();
            for g in table {
                let mut ok = true;
                for k in 0..n {
                    let pos = start + k;
                    let wildcard = anchored && !found[pos];
                    if !wildcard && g.0[k] != phrase[pos] {
                        ok = false;
                    }
                }
                if ok {
                    candidates.push(g);
                }
            }

            let target = candidates.iter().position(|g| g.0.as_slice() == window);
            let hit = match (candidates.len(), target) {
                (c, Some(p)) if c > 1 => Some(if anchored {
                    p as u64 + 1
                } else {
                    store.rank(n, candidates[p].1)
                }),
                (c, None) if c > 1 => {
                    not_found.push(if anchored {
                        c as u64
                    } else {
                        store.max_rank(n)
                    });
                    None
                }
                (1, Some(_)) => Some(if anchored {
                    1
                } else {
                    store.rank(n, candidates[0].1)
                }),
                _ => {
                    not_found.push(store.max_rank(n));
                    None
                }
            };
            if let Some(r) = hit {
                score.push(r);
                found[start..start + n].fill(true);
            }
        }
    }

    let all_found = len > 0 && found.iter().all(|f| *f);
    let prod = |v: &[u64]| v.iter().fold(BigUint::from(1u32), |a, &x| a * x);
    let low = all_found.then(|| prod(&score));
    let high = low.as_ref().map(|l| {
        if not_found.is_empty() {
            l.clone()
        } else {
            l + prod(&not_found)
        }
    });
    HandResult {
        low,
        high,
        score,
        score_not_found: not_found,
    }
}
