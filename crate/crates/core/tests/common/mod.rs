//! Independent reference implementations used to cross-check the library.
//! Everything here works on raw image vectors and `u64` masks and shares no
//! algorithmic code with the crate under test.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use almost_group::{Automaton, StateSet};

pub fn images(a: &Automaton) -> Vec<Vec<usize>> {
    a.letters().iter().map(|l| l.map.images().to_vec()).collect()
}

/// Right action, left to right: `q · (x y) = (q · x) · y`.
pub fn compose(t: &[usize], u: &[usize]) -> Vec<usize> {
    t.iter().map(|&q| u[q]).collect()
}

pub fn word_images(letters: &[Vec<usize>], word: &[usize], n: usize) -> Vec<usize> {
    word.iter().fold((0..n).collect(), |acc, &x| compose(&acc, &letters[x]))
}

pub fn mask(states: &[usize]) -> u64 {
    states.iter().fold(0, |m, &q| m | 1 << q)
}

/// `(excl, dupl)` counted directly from preimage sizes.
pub fn excl_dupl(t: &[usize]) -> (u64, u64) {
    let mut hits = vec![0usize; t.len()];
    for &q in t {
        hits[q] += 1;
    }
    let mut excl = 0;
    let mut dupl = 0;
    for (q, &h) in hits.iter().enumerate() {
        if h == 0 {
            excl |= 1 << q;
        }
        if h >= 2 {
            dupl |= 1 << q;
        }
    }
    (excl, dupl)
}

pub fn image_mask(t: &[usize], m: u64) -> u64 {
    (0..t.len())
        .filter(|&q| m >> q & 1 == 1)
        .fold(0, |acc, q| acc | 1 << t[q])
}

/// Naive closure of the generated group.
pub fn group(gens: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = compose(&g, s);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    seen.into_iter().collect()
}

/// `B` is a block iff each group image of `B` equals `B` or misses it.
pub fn is_block(group: &[Vec<usize>], b: u64) -> bool {
    b != 0
        && group.iter().all(|g| {
            let img = image_mask(g, b);
            img == b || img & b == 0
        })
}

/// Every block containing `e`, by exhaustive subset scan.
pub fn all_blocks_containing(group: &[Vec<usize>], n: usize, e: usize) -> Vec<u64> {
    (1u64..1 << n)
        .filter(|&b| b >> e & 1 == 1 && is_block(group, b))
        .collect()
}

pub fn is_transitive(gens: &[Vec<usize>], n: usize) -> bool {
    let mut seen = 1u64;
    let mut stack = vec![0];
    while let Some(q) = stack.pop() {
        for g in gens {
            if seen >> g[q] & 1 == 0 {
                seen |= 1 << g[q];
                stack.push(g[q]);
            }
        }
    }
    seen.count_ones() as usize == n
}

/// Subsets reachable from `Q` with their BFS distance.
pub fn reachable(letters: &[Vec<usize>], n: usize) -> std::collections::HashMap<u64, usize> {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut dist = std::collections::HashMap::from([(full, 0usize)]);
    let mut queue = VecDeque::from([full]);
    while let Some(s) = queue.pop_front() {
        let d = dist[&s];
        for t in letters {
            let img = image_mask(t, s);
            if let std::collections::hash_map::Entry::Vacant(v) = dist.entry(img) {
                v.insert(d + 1);
                queue.push_back(img);
            }
        }
    }
    dist
}

pub fn is_completely_reachable(letters: &[Vec<usize>], n: usize) -> bool {
    reachable(letters, n).len() == (1usize << n) - 1
}

pub fn set(states: &[usize]) -> StateSet {
    StateSet(mask(states))
}

/// 0-indexed set from 1-indexed labels.
pub fn set1(states: &[usize]) -> StateSet {
    StateSet(states.iter().fold(0, |m, &q| m | 1 << (q - 1)))
}

pub fn fixture(name: &str) -> Automaton {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap();
    almost_group::parse_automaton(&text).unwrap()
}
