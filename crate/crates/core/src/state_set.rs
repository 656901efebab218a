//! Sets of states packed into a single machine word.

use std::fmt;

use serde::{Serialize, Serializer};

/// Internal state index, `0 <= q < n`. Rendered 1-indexed at every I/O boundary.
pub type StateId = usize;

/// Largest state count representable by a [`StateSet`].
pub const MAX_STATES: usize = 64;

/// A subset of `{0, .., n-1}` for `n <= 64`.
///
/// Ordering (`Ord`) is by bit pattern; use [`StateSet::cmp_lex`] for the
/// size-then-lexicographic order used in reports.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn full(n: usize) -> StateSet {
        debug_assert!(n <= MAX_STATES);
        if n == 64 {
            StateSet(u64::MAX)
        } else {
            StateSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(q: StateId) -> StateSet {
        StateSet(1u64 << q)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, q: StateId) -> bool {
        q < MAX_STATES && self.0 >> q & 1 == 1
    }

    pub fn insert(&mut self, q: StateId) {
        self.0 |= 1u64 << q;
    }

    pub fn remove(&mut self, q: StateId) {
        self.0 &= !(1u64 << q);
    }

    pub fn union(self, other: StateSet) -> StateSet {
        StateSet(self.0 | other.0)
    }

    pub fn intersection(self, other: StateSet) -> StateSet {
        StateSet(self.0 & other.0)
    }

    pub fn difference(self, other: StateSet) -> StateSet {
        StateSet(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> StateSet {
        StateSet::full(n).difference(self)
    }

    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: StateSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn first(self) -> Option<StateId> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as StateId)
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    pub fn to_vec(self) -> Vec<StateId> {
        self.iter().collect()
    }

    /// 1-indexed members, for reports.
    pub fn to_one_indexed(self) -> Vec<usize> {
        self.iter().map(|q| q + 1).collect()
    }

    /// Size first, then lexicographic on the sorted member list.
    pub fn cmp_lex(&self, other: &StateSet) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.iter().cmp(other.iter()))
    }

    /// Parses `{1,3}` (1-indexed, braces optional, whitespace tolerated).
    pub fn parse_one_indexed(text: &str, n: usize) -> Result<StateSet, String> {
        let inner = text.trim();
        let inner = inner.strip_prefix('{').unwrap_or(inner);
        let inner = inner.strip_suffix('}').unwrap_or(inner);
        let mut set = StateSet::EMPTY;
        for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: usize = tok.parse().map_err(|_| format!("invalid state `{tok}` in `{text}`"))?;
            if v == 0 || v > n {
                return Err(format!("state {v} out of range 1..={n}"));
            }
            set.insert(v - 1);
        }
        Ok(set)
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let mut set = StateSet::EMPTY;
        for q in iter {
            set.insert(q);
        }
        set
    }
}

impl IntoIterator for StateSet {
    type Item = StateId;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = StateId;

    fn next(&mut self) -> Option<StateId> {
        if self.0 == 0 {
            return None;
        }
        let q = self.0.trailing_zeros() as StateId;
        self.0 &= self.0 - 1;
        Some(q)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Iter {}

/// Brace notation with 1-indexed states, e.g. `{1,5}`.
impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, q) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", q + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as the sorted 1-indexed member list.
impl Serialize for StateSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|q| q + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_one_indexed() {
        let s: StateSet = [0, 4].into_iter().collect();
        assert_eq!(s.to_string(), "{1,5}");
        assert_eq!(StateSet::EMPTY.to_string(), "{}");
    }

    #[test]
    fn parse_round_trip() {
        let s = StateSet::parse_one_indexed("{1, 3}", 4).unwrap();
        assert_eq!(s.to_vec(), vec![0, 2]);
        assert!(StateSet::parse_one_indexed("{5}", 4).is_err());
        assert!(StateSet::parse_one_indexed("{0}", 4).is_err());
        assert_eq!(StateSet::parse_one_indexed("2,4", 4).unwrap().to_vec(), vec![1, 3]);
    }

    #[test]
    fn full_sets() {
        assert_eq!(StateSet::full(64).len(), 64);
        assert_eq!(StateSet::full(3).to_vec(), vec![0, 1, 2]);
        assert_eq!(StateSet::singleton(2).complement(4).to_vec(), vec![0, 1, 3]);
    }

    #[test]
    fn lex_order() {
        let a: StateSet = [0, 4].into_iter().collect();
        let b: StateSet = [1, 2].into_iter().collect();
        let c: StateSet = [3].into_iter().collect();
        let mut v = vec![b, a, c];
        v.sort_by(StateSet::cmp_lex);
        assert_eq!(v, vec![c, a, b]);
    }
}
