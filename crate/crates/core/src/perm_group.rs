//! The group generated by the permutation letters: orbits, blocks of
//! imprimitivity, block systems, stabilizers and cores.
//!
//! Block computations assume a transitive generator set and refuse otherwise.
//! Stabilizers and cores work on an explicitly enumerated group, capped by
//! [`DEFAULT_GROUP_CAP`].

use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use crate::automaton::{Automaton, Transformation, Word};
use crate::error::{Error, Result};
use crate::par::{self, Strategy};
use crate::state_set::{StateId, StateSet};

pub const DEFAULT_GROUP_CAP: usize = 1_000_000;
pub const DEFAULT_BLOCK_LATTICE_CAP: usize = 4096;

/// A bijection stored together with its inverse. States fit in a byte.
#[derive(Clone, Debug)]
pub struct Permutation {
    forward: Box<[u8]>,
    inverse: Box<[u8]>,
}

impl PartialEq for Permutation {
    fn eq(&self, other: &Self) -> bool {
        self.forward == other.forward
    }
}

impl Eq for Permutation {}

impl Hash for Permutation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.forward.hash(state)
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        let id: Box<[u8]> = (0..n as u8).collect();
        Permutation {
            forward: id.clone(),
            inverse: id,
        }
    }

    fn from_forward(forward: Box<[u8]>) -> Permutation {
        let mut inverse = vec![0u8; forward.len()].into_boxed_slice();
        for (q, &p) in forward.iter().enumerate() {
            inverse[p as usize] = q as u8;
        }
        Permutation { forward, inverse }
    }

    pub fn from_transformation(t: &Transformation) -> Result<Permutation> {
        if !t.is_permutation() {
            return Err(Error::InvalidParameter(format!("{t} is not a permutation")));
        }
        Ok(Permutation::from_forward(t.images().iter().map(|&q| q as u8).collect()))
    }

    pub fn from_cycles(n: usize, cycles: &[Vec<StateId>]) -> Result<Permutation> {
        Permutation::from_transformation(&Transformation::from_cycles(n, cycles)?)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    #[inline]
    pub fn apply(&self, q: StateId) -> StateId {
        self.forward[q] as StateId
    }

    #[inline]
    pub fn apply_inverse(&self, q: StateId) -> StateId {
        self.inverse[q] as StateId
    }

    pub fn apply_set(&self, set: StateSet) -> StateSet {
        set.iter().map(|q| self.apply(q)).collect()
    }

    /// `self` first, then `then`.
    pub fn then(&self, then: &Permutation) -> Permutation {
        Permutation::from_forward(self.forward.iter().map(|&q| then.forward[q as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(q, &p)| q == p as usize)
    }

    pub fn images(&self) -> &[u8] {
        &self.forward
    }

    pub fn to_transformation(&self) -> Transformation {
        Transformation::from_images(self.forward.iter().map(|&q| q as StateId).collect())
            .expect("permutation images are in range")
    }
}

#[derive(Clone, Debug)]
pub struct Generator {
    /// Letter index in the originating automaton (or position when built directly).
    pub letter: usize,
    pub name: String,
    pub perm: Permutation,
}

/// The permutation letters, in alphabet order.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    n: usize,
    gens: Vec<Generator>,
}

/// Result of [`GeneratorSet::orbit`].
#[derive(Clone, Debug)]
pub struct Orbit {
    pub set: StateSet,
    /// Members in breadth-first discovery order.
    pub order: Vec<StateId>,
    witnesses: HashMap<StateId, Word>,
}

impl Orbit {
    /// Shortest generator word taking the orbit's root to `q`.
    ///
    /// Panics if `q` is not in the orbit.
    pub fn witness(&self, q: StateId) -> &Word {
        &self.witnesses[&q]
    }

    pub fn try_witness(&self, q: StateId) -> Option<&Word> {
        self.witnesses.get(&q)
    }
}

/// A partition of the states into blocks that the group permutes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSystem {
    /// Sorted by smallest member.
    pub blocks: Vec<StateSet>,
    /// Index of the block the system was generated from.
    pub seed_index: usize,
}

impl BlockSystem {
    pub fn block_of(&self, q: StateId) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(q))
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }
}

impl GeneratorSet {
    pub fn new(n: usize, perms: Vec<Permutation>) -> Result<GeneratorSet> {
        let gens = perms
            .into_iter()
            .enumerate()
            .map(|(i, perm)| {
                if perm.len() != n {
                    return Err(Error::LengthMismatch {
                        left: n,
                        right: perm.len(),
                    });
                }
                Ok(Generator {
                    letter: i,
                    name: format!("g{i}"),
                    perm,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneratorSet { n, gens })
    }

    /// Generators from the given letters of an automaton, which must be permutations.
    pub fn from_letters(a: &Automaton, letters: &[usize]) -> GeneratorSet {
        let gens = letters
            .iter()
            .map(|&i| {
                let l = a.letter(i);
                Generator {
                    letter: i,
                    name: l.name.clone(),
                    perm: Permutation::from_transformation(&l.map).expect("permutation letter"),
                }
            })
            .collect();
        GeneratorSet { n: a.n(), gens }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    /// Closure of `{q}` under the generators; witnesses are shortest, ties
    /// broken by generator order.
    pub fn orbit(&self, q: StateId) -> Orbit {
        let mut set = StateSet::singleton(q);
        let mut order = vec![q];
        let mut witnesses = HashMap::from([(q, Word::empty())]);
        let mut head = 0;
        while head < order.len() {
            let p = order[head];
            head += 1;
            for g in &self.gens {
                let r = g.perm.apply(p);
                if !set.contains(r) {
                    set.insert(r);
                    order.push(r);
                    let mut w = witnesses[&p].clone();
                    w.push(g.letter);
                    witnesses.insert(r, w);
                }
            }
        }
        Orbit { set, order, witnesses }
    }

    /// The permutation of a word over the generators' letter indices.
    ///
    /// Panics if the word uses a letter that is not a generator.
    pub fn word_permutation(&self, w: &Word) -> Permutation {
        w.letters().iter().fold(Permutation::identity(self.n), |acc, &l| {
            let g = self.gens.iter().find(|g| g.letter == l).expect("letter is a generator");
            acc.then(&g.perm)
        })
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).set.len() == self.n
    }

    fn require_transitive(&self) -> Result<()> {
        if self.is_transitive() {
            Ok(())
        } else {
            Err(Error::NotTransitive)
        }
    }

    /// Smallest block containing `seed`.
    ///
    /// Merge-find refinement: once `p` and `q` share a class, `p·g` and `q·g`
    /// must share one for every generator `g`.
    pub fn minimal_block(&self, seed: StateSet) -> Result<StateSet> {
        self.require_transitive()?;
        if seed.is_empty() {
            return Err(Error::InvalidParameter("empty seed".into()));
        }
        Ok(self.minimal_block_unchecked(seed))
    }

    fn minimal_block_unchecked(&self, seed: StateSet) -> StateSet {
        let mut uf = UnionFind::new(self.n);
        let mut pending: Vec<(StateId, StateId)> = Vec::new();
        let root = seed.first().expect("non-empty seed");
        for q in seed.iter().skip(1) {
            if uf.union(root, q) {
                pending.push((root, q));
            }
        }
        while let Some((p, q)) = pending.pop() {
            for g in &self.gens {
                let (pg, qg) = (g.perm.apply(p), g.perm.apply(q));
                if uf.union(pg, qg) {
                    pending.push((pg, qg));
                }
            }
        }
        let r = uf.find(root);
        (0..self.n).filter(|&q| uf.find(q) == r).collect()
    }

    /// Every block containing `e`, sorted by size then lexicographically.
    ///
    /// Built as the join-closure of the minimal blocks `{e, q}`; the join of
    /// two blocks is the minimal block of their union.
    pub fn blocks_containing(&self, e: StateId, include_trivial: bool, cap: usize) -> Result<Vec<StateSet>> {
        self.require_transitive()?;
        let full = StateSet::full(self.n);
        let mut found: Vec<StateSet> = Vec::new();
        let mut seen: HashSet<StateSet> = HashSet::new();
        for q in (0..self.n).filter(|&q| q != e) {
            let b = self.minimal_block_unchecked([e, q].into_iter().collect());
            if seen.insert(b) {
                found.push(b);
            }
        }
        let mut i = 0;
        while i < found.len() {
            for j in 0..i {
                let joined = found[i].union(found[j]);
                if seen.contains(&joined) {
                    continue;
                }
                let b = self.minimal_block_unchecked(joined);
                if seen.insert(b) {
                    found.push(b);
                    if found.len() > cap {
                        return Err(Error::BlockLatticeTooLarge(cap));
                    }
                }
            }
            i += 1;
        }
        let singleton = StateSet::singleton(e);
        found.retain(|&b| b != full && b != singleton);
        if include_trivial {
            found.push(singleton);
            if self.n > 1 {
                found.push(full);
            }
        }
        found.sort_by(StateSet::cmp_lex);
        Ok(found)
    }

    /// The images of `block` under the group, as a partition.
    ///
    /// Fails with [`Error::NotABlock`] on a partial overlap, which makes this
    /// the block-validity test as well.
    pub fn system_from_block(&self, block: StateSet) -> Result<BlockSystem> {
        if block.is_empty() {
            return Err(Error::InvalidParameter("empty block".into()));
        }
        let mut blocks = vec![block];
        let mut covered = block;
        let mut head = 0;
        while head < blocks.len() {
            let b = blocks[head];
            head += 1;
            for g in &self.gens {
                let img = g.perm.apply_set(b);
                if img.is_disjoint(covered) {
                    covered = covered.union(img);
                    blocks.push(img);
                } else if !blocks.contains(&img) {
                    return Err(Error::NotABlock(block));
                }
            }
        }
        if covered != StateSet::full(self.n) {
            return Err(Error::NotTransitive);
        }
        blocks.sort_by_key(|b| b.first());
        let seed_index = blocks.iter().position(|&b| b == block).expect("seed present");
        Ok(BlockSystem { blocks, seed_index })
    }

    pub fn is_primitive(&self) -> bool {
        if !self.is_transitive() {
            return false;
        }
        let full = StateSet::full(self.n);
        (1..self.n).all(|q| self.minimal_block_unchecked([0, q].into_iter().collect()) == full)
    }

    pub fn enumerate_group(&self, cap: usize) -> GroupElements {
        self.enumerate_group_with(cap, Strategy::default())
    }

    /// Breadth-first closure of the identity under right multiplication by
    /// generators. Stops, flagged incomplete, once more than `cap` elements
    /// would be needed.
    pub fn enumerate_group_with(&self, cap: usize, strategy: Strategy) -> GroupElements {
        let id = Permutation::identity(self.n);
        let mut seen: HashSet<Box<[u8]>> = HashSet::from([id.forward.clone()]);
        let mut elements = vec![id];
        let mut layer_start = 0;
        let mut complete = true;
        if cap == 0 {
            return GroupElements {
                n: self.n,
                elements: Vec::new(),
                complete: false,
            };
        }
        'outer: while layer_start < elements.len() {
            let layer_end = elements.len();
            let succ = par::map_layer(strategy, &elements[layer_start..layer_end], |p| {
                self.gens
                    .iter()
                    .map(|g| {
                        p.forward
                            .iter()
                            .map(|&q| g.perm.forward[q as usize])
                            .collect::<Box<[u8]>>()
                    })
                    .collect::<Vec<_>>()
            });
            for images in succ.into_iter().flatten() {
                if seen.contains(&images) {
                    continue;
                }
                if elements.len() >= cap {
                    complete = false;
                    break 'outer;
                }
                seen.insert(images.clone());
                elements.push(Permutation::from_forward(images));
            }
            layer_start = layer_end;
        }
        GroupElements {
            n: self.n,
            elements,
            complete,
        }
    }
}

/// An explicit list of group elements.
#[derive(Clone, Debug)]
pub struct GroupElements {
    n: usize,
    elements: Vec<Permutation>,
    complete: bool,
}

impl GroupElements {
    /// Wraps a list already known to be closed (e.g. a filtered subgroup).
    pub fn from_complete(n: usize, elements: Vec<Permutation>) -> GroupElements {
        GroupElements {
            n,
            elements,
            complete: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.contains(p)
    }

    fn require_complete(&self) -> Result<()> {
        if self.complete {
            Ok(())
        } else {
            Err(Error::IncompleteGroup(self.elements.len()))
        }
    }

    fn filter(&self, keep: impl Fn(&Permutation) -> bool) -> GroupElements {
        GroupElements {
            n: self.n,
            elements: self.elements.iter().filter(|p| keep(p)).cloned().collect(),
            complete: true,
        }
    }

    /// `{ σ : P·σ = P }`.
    pub fn setwise_stabilizer(&self, set: StateSet) -> Result<GroupElements> {
        self.require_complete()?;
        Ok(self.filter(|p| p.apply_set(set) == set))
    }

    /// Elements fixing every block of `system` setwise: the kernel of the
    /// action on blocks.
    pub fn core_of_system(&self, system: &BlockSystem) -> Result<GroupElements> {
        self.require_complete()?;
        Ok(self.filter(|p| system.blocks.iter().all(|&b| p.apply_set(b) == b)))
    }

    /// Whether the orbit of a point of `block` under these elements is the whole block.
    pub fn is_transitive_on(&self, block: StateSet) -> bool {
        let Some(b) = block.first() else { return false };
        let orbit: StateSet = self.elements.iter().map(|p| p.apply(b)).collect();
        orbit == block
    }
}

/// `is_transitive_on` under the name used by the decision pipeline.
pub fn is_core_transitive_on(core: &GroupElements, block: StateSet) -> bool {
    core.is_transitive_on(block)
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already in the same class.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
