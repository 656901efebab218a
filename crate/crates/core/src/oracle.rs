//! Exhaustive subset reachability: breadth-first search over `P ↦ P·x`
//! starting from the full state set.

use serde::Serialize;

use crate::automaton::{Automaton, Word};
use crate::error::{Error, Result};
use crate::par::{self, Strategy};
use crate::state_set::StateSet;

pub const DEFAULT_MAX_STATES: usize = 24;

const UNSEEN: u32 = u32::MAX;

/// Image of a subset bitmask under one letter, via one lookup per byte.
struct ImageTable {
    chunks: Vec<[u64; 256]>,
}

impl ImageTable {
    fn new(images: &[usize]) -> ImageTable {
        let n = images.len();
        let chunks = (0..n.div_ceil(8))
            .map(|c| {
                let mut table = [0u64; 256];
                for (byte, slot) in table.iter_mut().enumerate() {
                    for bit in 0..8 {
                        let q = c * 8 + bit;
                        if byte >> bit & 1 == 1 && q < n {
                            *slot |= 1u64 << images[q];
                        }
                    }
                }
                table
            })
            .collect();
        ImageTable { chunks }
    }

    #[inline]
    fn apply(&self, mask: u32) -> u32 {
        let mut out = 0u64;
        for (c, table) in self.chunks.iter().enumerate() {
            out |= table[(mask >> (8 * c) & 0xff) as usize];
        }
        out as u32
    }
}

/// Visited subsets with parent pointers for shortest-witness readback.
pub struct ReachabilityTable {
    n: usize,
    parent: Vec<u32>,
    letter: Vec<u8>,
    depth: Vec<u16>,
    reachable: usize,
}

impl ReachabilityTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_reachable(&self, p: StateSet) -> bool {
        p.bits() < (1u64 << self.n) && self.parent[p.bits() as usize] != UNSEEN
    }

    /// Number of reachable non-empty subsets (the full set included).
    pub fn reachable_count(&self) -> usize {
        self.reachable
    }

    pub fn is_completely_reachable(&self) -> bool {
        self.reachable == (1usize << self.n) - 1
    }

    /// Length of the shortest word reaching `p`.
    pub fn distance(&self, p: StateSet) -> Option<usize> {
        self.is_reachable(p).then(|| self.depth[p.bits() as usize] as usize)
    }

    /// Unreachable non-empty subsets ordered by size then bitmask value,
    /// truncated to `limit`.
    pub fn unreachable(&self, limit: usize) -> Vec<StateSet> {
        let mut by_size: Vec<Vec<StateSet>> = vec![Vec::new(); self.n + 1];
        for mask in 1..(1u64 << self.n) {
            if self.parent[mask as usize] == UNSEEN {
                let bucket = &mut by_size[mask.count_ones() as usize];
                if bucket.len() < limit {
                    bucket.push(StateSet(mask));
                }
            }
        }
        by_size.into_iter().flatten().take(limit).collect()
    }

    /// Shortest word `w` with `Q·w = p`; ties broken by letter order.
    pub fn shortest_witness(&self, p: StateSet) -> Result<Word> {
        if !self.is_reachable(p) {
            return Err(Error::Unreachable(p));
        }
        let full = (1u32 << self.n) - 1;
        let mut cur = p.bits() as u32;
        let mut letters = Vec::new();
        while cur != full {
            letters.push(self.letter[cur as usize] as usize);
            cur = self.parent[cur as usize];
        }
        letters.reverse();
        Ok(Word(letters))
    }

    /// Per subset size `k`, the longest shortest witness, checked against `2n(n - k)`.
    pub fn witness_length_stats(&self) -> WitnessStats {
        let n = self.n;
        let mut per_size: Vec<SizeStat> = (0..=n)
            .map(|k| SizeStat {
                k,
                reachable: 0,
                max_length: 0,
                bound: 2 * n * (n - k),
                exceeds_bound: false,
            })
            .collect();
        for mask in 1..(1usize << n) {
            if self.parent[mask] == UNSEEN {
                continue;
            }
            let s = &mut per_size[mask.count_ones() as usize];
            s.reachable += 1;
            s.max_length = s.max_length.max(self.depth[mask] as usize);
        }
        for s in &mut per_size {
            s.exceeds_bound = s.max_length > s.bound;
        }
        per_size.remove(0);
        WitnessStats { n, per_size }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeStat {
    pub k: usize,
    pub reachable: usize,
    pub max_length: usize,
    pub bound: usize,
    pub exceeds_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessStats {
    pub n: usize,
    /// Sizes `1..=n`.
    pub per_size: Vec<SizeStat>,
}

impl WitnessStats {
    pub fn violations(&self) -> Vec<&SizeStat> {
        self.per_size.iter().filter(|s| s.exceeds_bound).collect()
    }
}

pub fn reachable_subsets(a: &Automaton, max_states: usize) -> Result<ReachabilityTable> {
    reachable_subsets_with(a, max_states, Strategy::default())
}

/// Both strategies return identical tables: each layer's successors are
/// merged in (parent order, letter order).
pub fn reachable_subsets_with(a: &Automaton, max_states: usize, strategy: Strategy) -> Result<ReachabilityTable> {
    let n = a.n();
    let cap = max_states.min(31);
    if n > cap {
        return Err(Error::TooManyStates { n, cap });
    }
    if a.letters().len() > u8::MAX as usize {
        return Err(Error::InvalidParameter(format!(
            "oracle supports at most {} letters, got {}",
            u8::MAX,
            a.letters().len()
        )));
    }
    let tables: Vec<ImageTable> = a.letters().iter().map(|l| ImageTable::new(l.map.images())).collect();
    let size = 1usize << n;
    let full = (size - 1) as u32;
    let mut parent = vec![UNSEEN; size];
    let mut letter = vec![u8::MAX; size];
    let mut depth = vec![0u16; size];
    parent[full as usize] = full;
    let mut reachable = 1;
    let mut frontier = vec![full];
    let mut d: u16 = 0;
    while !frontier.is_empty() {
        d += 1;
        let succ = par::map_layer(strategy, &frontier, |&s| {
            tables.iter().map(|t| t.apply(s)).collect::<Vec<u32>>()
        });
        let mut next = Vec::new();
        for (&s, images) in frontier.iter().zip(succ) {
            for (l, img) in images.into_iter().enumerate() {
                if parent[img as usize] == UNSEEN {
                    parent[img as usize] = s;
                    letter[img as usize] = l as u8;
                    depth[img as usize] = d;
                    reachable += 1;
                    next.push(img);
                }
            }
        }
        frontier = next;
    }
    Ok(ReachabilityTable {
        n,
        parent,
        letter,
        depth,
        reachable,
    })
}

/// `(completely reachable?, first unreachable subsets up to limit)`.
pub fn is_completely_reachable_bruteforce(
    a: &Automaton,
    max_states: usize,
    limit: usize,
) -> Result<(bool, Vec<StateSet>)> {
    let table = reachable_subsets(a, max_states)?;
    Ok((table.is_completely_reachable(), table.unreachable(limit)))
}
