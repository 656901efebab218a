//! Rystsov graphs `Γ₁, Γ₂, …` of a standardized almost-group automaton.
//!
//! Words are never enumerated. The pair `(excl(w), dupl(w))` changes
//! deterministically when a letter is appended, so a breadth-first search over
//! these pairs visits exactly the profiles of all words. Defect never drops
//! along prefixes, which makes pruning at a defect bound lossless.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::automaton::{AlmostGroupShape, Automaton, Transformation, Word};
use crate::error::{Error, Result};
use crate::par::{self, Strategy};
use crate::perm_group::GeneratorSet;
use crate::scc::tarjan;
use crate::state_set::{StateId, StateSet};

/// `(excl(w), dupl(w))` for some word `w`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize)]
pub struct DefectProfile {
    pub excl: StateSet,
    pub dupl: StateSet,
}

impl DefectProfile {
    pub const EMPTY: DefectProfile = DefectProfile {
        excl: StateSet::EMPTY,
        dupl: StateSet::EMPTY,
    };

    pub fn of(t: &Transformation) -> DefectProfile {
        DefectProfile {
            excl: t.excl(),
            dupl: t.dupl(),
        }
    }

    pub fn defect(&self) -> usize {
        self.excl.len()
    }

    /// Profile of `wx` given the profile of `w` and the letter `x`.
    ///
    /// A state `t` of the new image has two or more preimages exactly when at
    /// least two states of the old image map to it, or one that does was
    /// already duplicated.
    pub fn step(&self, letter: &Transformation) -> DefectProfile {
        let n = letter.len();
        let image = self.excl.complement(n);
        let mut hit = StateSet::EMPTY;
        let mut dupl = StateSet::EMPTY;
        for s in image {
            let t = letter.image(s);
            if hit.contains(t) || self.dupl.contains(s) {
                dupl.insert(t);
            }
            hit.insert(t);
        }
        DefectProfile {
            excl: hit.complement(n),
            dupl,
        }
    }
}

pub fn profile_of(t: &Transformation) -> DefectProfile {
    DefectProfile::of(t)
}

/// Steps a profile by a letter of `a`, looked up by name.
pub fn profile_step(a: &Automaton, p: &DefectProfile, letter: &str) -> Result<DefectProfile> {
    let idx = a.letter_index(letter)?;
    Ok(p.step(&a.letter(idx).map))
}

/// Letter action specialised for permutations.
enum LetterAction {
    Perm(Transformation),
    General(Transformation),
}

impl LetterAction {
    fn step(&self, p: &DefectProfile) -> DefectProfile {
        match self {
            LetterAction::Perm(t) => DefectProfile {
                excl: t.apply_set(p.excl),
                dupl: t.apply_set(p.dupl),
            },
            LetterAction::General(t) => p.step(t),
        }
    }
}

/// All profiles of words whose defect stays within a bound, in
/// breadth-first order, with shortest witnesses.
#[derive(Clone, Debug)]
pub struct ProfileSpace {
    max_defect: usize,
    profiles: Vec<DefectProfile>,
    parent: Vec<Option<(usize, usize)>>,
    index: HashMap<DefectProfile, usize>,
}

impl ProfileSpace {
    pub fn max_defect(&self) -> usize {
        self.max_defect
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profiles(&self) -> &[DefectProfile] {
        &self.profiles
    }

    pub fn contains(&self, p: &DefectProfile) -> bool {
        self.index.contains_key(p)
    }

    pub fn position(&self, p: &DefectProfile) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Shortest word with the profile at `idx`; ties broken by letter order.
    pub fn witness(&self, mut idx: usize) -> Word {
        let mut letters = Vec::new();
        while let Some((prev, letter)) = self.parent[idx] {
            letters.push(letter);
            idx = prev;
        }
        letters.reverse();
        Word(letters)
    }

    pub fn witness_of(&self, p: &DefectProfile) -> Option<Word> {
        self.position(p).map(|i| self.witness(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &DefectProfile)> {
        self.profiles.iter().enumerate()
    }
}

pub fn reachable_profiles(a: &Automaton, max_defect: usize) -> ProfileSpace {
    reachable_profiles_with(a, max_defect, Strategy::default())
}

pub fn reachable_profiles_with(a: &Automaton, max_defect: usize, strategy: Strategy) -> ProfileSpace {
    let actions: Vec<LetterAction> = a
        .letters()
        .iter()
        .map(|l| {
            if l.map.is_permutation() {
                LetterAction::Perm(l.map.clone())
            } else {
                LetterAction::General(l.map.clone())
            }
        })
        .collect();
    let mut space = ProfileSpace {
        max_defect,
        profiles: vec![DefectProfile::EMPTY],
        parent: vec![None],
        index: HashMap::from([(DefectProfile::EMPTY, 0)]),
    };
    let mut start = 0;
    while start < space.profiles.len() {
        let end = space.profiles.len();
        let succ = par::map_layer(strategy, &space.profiles[start..end], |p| {
            actions.iter().map(|act| act.step(p)).collect::<Vec<_>>()
        });
        for (offset, nexts) in succ.into_iter().enumerate() {
            for (letter, q) in nexts.into_iter().enumerate() {
                if q.defect() > max_defect || space.index.contains_key(&q) {
                    continue;
                }
                space.index.insert(q, space.profiles.len());
                space.profiles.push(q);
                space.parent.push(Some((start + offset, letter)));
            }
        }
        start = end;
    }
    space
}

#[derive(Clone, Debug, Serialize)]
pub struct RystsovVertex {
    pub id: usize,
    /// Vertex ids of the previous level; empty at level 1.
    pub members: Vec<usize>,
    pub foliage: StateSet,
}

#[derive(Clone, Debug)]
pub struct RystsovEdge {
    pub source: usize,
    pub target: usize,
    pub profile: DefectProfile,
    pub witness: Word,
    /// Inherited from the previous level rather than discovered at this one.
    pub carried: bool,
}

#[derive(Clone, Debug)]
pub struct RystsovLevel {
    pub k: usize,
    pub vertices: Vec<RystsovVertex>,
    pub edges: Vec<RystsovEdge>,
    /// Strongly connected components as vertex-id lists, ordered by smallest
    /// contained state.
    pub scc: Vec<Vec<usize>>,
    /// Index into `scc` of the component containing `e`.
    pub c_e_index: usize,
    scc_of: Vec<usize>,
}

impl RystsovLevel {
    fn new(k: usize, vertices: Vec<RystsovVertex>, edges: Vec<RystsovEdge>, e: StateId) -> RystsovLevel {
        let mut adj = vec![Vec::new(); vertices.len()];
        for edge in &edges {
            adj[edge.source].push(edge.target);
        }
        let mut scc = tarjan(vertices.len(), &adj);
        let min_state = |comp: &Vec<usize>| comp.iter().filter_map(|&v| vertices[v].foliage.first()).min();
        scc.sort_by_key(min_state);
        let mut scc_of = vec![0; vertices.len()];
        for (i, comp) in scc.iter().enumerate() {
            for &v in comp {
                scc_of[v] = i;
            }
        }
        let v_e = vertices
            .iter()
            .position(|v| v.foliage.contains(e))
            .expect("foliages cover Q");
        RystsovLevel {
            k,
            c_e_index: scc_of[v_e],
            vertices,
            edges,
            scc,
            scc_of,
        }
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.scc.len() == 1
    }

    pub fn scc_of(&self, vertex: usize) -> usize {
        self.scc_of[vertex]
    }

    pub fn scc_foliage(&self, comp: usize) -> StateSet {
        self.scc[comp]
            .iter()
            .fold(StateSet::EMPTY, |acc, &v| acc.union(self.vertices[v].foliage))
    }

    /// `leaf(C_e)` at this level.
    pub fn c_e_foliage(&self) -> StateSet {
        self.scc_foliage(self.c_e_index)
    }

    /// Vertex whose foliage contains `q`.
    pub fn vertex_of_state(&self, q: StateId) -> usize {
        self.vertices
            .iter()
            .position(|v| v.foliage.contains(q))
            .expect("foliages cover Q")
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.edges.iter().any(|e| e.source == source && e.target == target)
    }

    /// Whether some component has a foliage of at least `k + 1` states.
    pub fn has_big_enough_component(&self) -> bool {
        (0..self.scc.len()).any(|c| self.scc_foliage(c).len() > self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StopReason {
    StronglyConnected,
    NoBigEnoughComponent,
}

#[derive(Clone, Debug)]
pub struct RystsovHierarchy {
    pub e: StateId,
    pub levels: Vec<RystsovLevel>,
    pub stop_reason: StopReason,
    /// Profiles with defect up to the last level's `k`.
    pub profiles: ProfileSpace,
}

impl RystsovHierarchy {
    pub fn last(&self) -> &RystsovLevel {
        self.levels.last().expect("at least one level")
    }

    pub fn level(&self, k: usize) -> Result<&RystsovLevel> {
        if k == 0 {
            return Err(Error::LevelOutOfRange(k));
        }
        self.levels.get(k - 1).ok_or(Error::LevelOutOfRange(k))
    }
}

fn require_standardized(shape: &AlmostGroupShape) -> Result<()> {
    if shape.standardized {
        Ok(())
    } else {
        Err(Error::InvalidParameter("automaton is not standardized".into()))
    }
}

/// `Γ₁`: vertices are the states; `p → q` for every defect-1 profile `({p},{q})`.
pub fn gamma1(a: &Automaton, shape: &AlmostGroupShape) -> Result<RystsovLevel> {
    require_standardized(shape)?;
    let space = reachable_profiles(a, 1);
    Ok(gamma1_from(a.n(), shape.e, &space))
}

fn gamma1_from(n: usize, e: StateId, space: &ProfileSpace) -> RystsovLevel {
    let vertices = (0..n)
        .map(|q| RystsovVertex {
            id: q,
            members: Vec::new(),
            foliage: StateSet::singleton(q),
        })
        .collect();
    let edges = space
        .iter()
        .filter(|(_, p)| p.defect() == 1)
        .map(|(i, p)| RystsovEdge {
            source: p.excl.first().expect("defect 1"),
            target: p.dupl.first().expect("defect 1 word duplicates one state"),
            profile: *p,
            witness: space.witness(i),
            carried: false,
        })
        .collect();
    RystsovLevel::new(1, vertices, edges, e)
}

fn next_level(prev: &RystsovLevel, space: &ProfileSpace, e: StateId) -> RystsovLevel {
    let k = prev.k + 1;
    let vertices: Vec<RystsovVertex> = prev
        .scc
        .iter()
        .enumerate()
        .map(|(id, comp)| RystsovVertex {
            id,
            members: comp.clone(),
            foliage: prev.scc_foliage(id),
        })
        .collect();
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    for edge in &prev.edges {
        let (s, t) = (prev.scc_of(edge.source), prev.scc_of(edge.target));
        if s != t && pairs.insert((s, t)) {
            edges.push(RystsovEdge {
                source: s,
                target: t,
                carried: true,
                ..edge.clone()
            });
        }
    }
    let owner = |q: StateId| vertices.iter().position(|v| v.foliage.contains(q)).expect("cover");
    for (i, p) in space.iter().filter(|(_, p)| p.defect() == k) {
        let c = owner(p.excl.first().expect("non-empty"));
        if !p.excl.is_subset(vertices[c].foliage) {
            continue;
        }
        for d in &vertices {
            if d.id != c && !p.dupl.is_disjoint(d.foliage) && pairs.insert((c, d.id)) {
                edges.push(RystsovEdge {
                    source: c,
                    target: d.id,
                    profile: *p,
                    witness: space.witness(i),
                    carried: false,
                });
            }
        }
    }
    RystsovLevel::new(k, vertices, edges, e)
}

pub fn build_hierarchy(a: &Automaton, shape: &AlmostGroupShape) -> Result<RystsovHierarchy> {
    build_hierarchy_with(a, shape, Strategy::default())
}

/// Builds `Γ₁, Γ₂, …` until a level is strongly connected or none of its
/// components has a foliage of at least `k + 1` states.
pub fn build_hierarchy_with(a: &Automaton, shape: &AlmostGroupShape, strategy: Strategy) -> Result<RystsovHierarchy> {
    require_standardized(shape)?;
    let mut space = reachable_profiles_with(a, 1, strategy);
    let mut levels = vec![gamma1_from(a.n(), shape.e, &space)];
    let stop_reason = loop {
        let cur = levels.last().expect("non-empty");
        if cur.is_strongly_connected() {
            break StopReason::StronglyConnected;
        }
        if !cur.has_big_enough_component() {
            break StopReason::NoBigEnoughComponent;
        }
        space = reachable_profiles_with(a, cur.k + 1, strategy);
        let next = next_level(cur, &space, shape.e);
        levels.push(next);
    };
    Ok(RystsovHierarchy {
        e: shape.e,
        levels,
        stop_reason,
        profiles: space,
    })
}

/// States duplicated by defect-1 words excluding exactly `e`.
pub fn d1_set(space: &ProfileSpace, e: StateId) -> StateSet {
    let only_e = StateSet::singleton(e);
    space
        .profiles()
        .iter()
        .filter(|p| p.excl == only_e)
        .fold(StateSet::EMPTY, |acc, p| acc.union(p.dupl))
}

/// `D_k`: states duplicated by words of defect at most `k` whose excluded set
/// contains `e` and lies inside `leaf(C_e)` of level `k - 1` (`{e}` for `k = 1`).
pub fn dk_set(a: &Automaton, hierarchy: &RystsovHierarchy, k: usize) -> Result<StateSet> {
    if k == 0 || k > hierarchy.levels.len() + 1 {
        return Err(Error::LevelOutOfRange(k));
    }
    let e = hierarchy.e;
    let bound = if k == 1 {
        StateSet::singleton(e)
    } else {
        hierarchy.level(k - 1)?.c_e_foliage()
    };
    let owned;
    let space = if hierarchy.profiles.max_defect() >= k {
        &hierarchy.profiles
    } else {
        owned = reachable_profiles(a, k);
        &owned
    };
    Ok(space
        .profiles()
        .iter()
        .filter(|p| p.defect() <= k && p.excl.contains(e) && p.excl.is_subset(bound))
        .fold(StateSet::EMPTY, |acc, p| acc.union(p.dupl)))
}

/// Checks that the edges of `Γ₁` are exactly the `G`-translates
/// `(e·σ, d·σ)` of the edges leaving `e`.
pub fn translated_edges_check(level: &RystsovLevel, gens: &GeneratorSet, e: StateId) -> Result<bool> {
    if level.k != 1 {
        return Err(Error::InvalidParameter("translation check applies to level 1".into()));
    }
    if !gens.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let d1: Vec<StateId> = level.edges.iter().filter(|x| x.source == e).map(|x| x.target).collect();
    let orbit = gens.orbit(e);
    let mut expected = HashSet::new();
    for q in 0..gens.n() {
        let sigma = gens.word_permutation(orbit.witness(q));
        for &d in &d1 {
            expected.insert((q, sigma.apply(d)));
        }
    }
    let actual: HashSet<(usize, usize)> = level.edges.iter().map(|x| (x.source, x.target)).collect();
    Ok(actual == expected)
}

/// Whether the foliages of `level` partition `Q` into a system of imprimitivity.
pub fn foliage_system_check(level: &RystsovLevel, gens: &GeneratorSet) -> bool {
    let n = gens.n();
    let mut covered = StateSet::EMPTY;
    for v in &level.vertices {
        if v.foliage.is_empty() || !v.foliage.is_disjoint(covered) {
            return false;
        }
        covered = covered.union(v.foliage);
    }
    if covered != StateSet::full(n) {
        return false;
    }
    let Ok(system) = gens.system_from_block(level.vertices[0].foliage) else {
        return false;
    };
    let mut foliages: Vec<StateSet> = level.vertices.iter().map(|v| v.foliage).collect();
    foliages.sort_by_key(|b| b.first());
    foliages == system.blocks
}

/// Graphviz rendering of one level. Vertices are labelled with their
/// 1-indexed foliage; edges optionally with their witness word.
pub fn dot_export(level: &RystsovLevel, a: &Automaton, labels: bool) -> String {
    let mut out = String::new();
    writeln!(out, "digraph gamma_{} {{", level.k).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for v in &level.vertices {
        let style = if level.scc_of(v.id) == level.c_e_index {
            ", style=bold"
        } else {
            ""
        };
        writeln!(out, "  v{} [label=\"{}\"{}];", v.id, v.foliage, style).unwrap();
    }
    for e in &level.edges {
        if labels {
            writeln!(
                out,
                "  v{} -> v{} [label=\"{}\"];",
                e.source,
                e.target,
                a.format_word(&e.witness)
            )
            .unwrap();
        } else {
            writeln!(out, "  v{} -> v{};", e.source, e.target).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
