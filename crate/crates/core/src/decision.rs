//! Decision pipeline for complete reachability.
//!
//! Order of checks:
//! 1. the permutation group must be transitive;
//! 2. no nontrivial block containing `e` may be invariant under `a`;
//! 3. a strongly connected Rystsov graph proves complete reachability;
//! 4. if every `C_e` core is transitive on its block, `leaf(C_e)` is
//!    `a`-invariant and the automaton is not completely reachable;
//! 5. otherwise the power-set oracle decides, or the outcome is reported as
//!    inconclusive when the fallback is disabled.
//!
//! Every cap (group size, block lattice, oracle states) degrades to the oracle
//! or to an inconclusive outcome, never to a verdict.

use std::fmt;

use serde::Serialize;

use crate::automaton::{classify_shape, standardize, AlmostGroupShape, Automaton};
use crate::error::{Error, Result};
use crate::oracle::{self, DEFAULT_MAX_STATES};
use crate::par::Strategy;
use crate::perm_group::{GeneratorSet, DEFAULT_BLOCK_LATTICE_CAP, DEFAULT_GROUP_CAP};
use crate::rystsov::{build_hierarchy_with, RystsovHierarchy, StopReason};
use crate::state_set::StateSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Answer {
    CompletelyReachable,
    NotCompletelyReachable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "level")]
pub enum DecidedBy {
    Transitivity,
    InvariantBlock,
    StronglyConnectedLevel(usize),
    CoreTransitiveInvariance(usize),
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Evidence {
    /// Orbit of `e` misses `missing`, so `Q ∖ {missing}` is unreachable.
    Orbit {
        orbit: StateSet,
        missing: usize,
        unreachable: StateSet,
    },
    /// `block · a ⊆ block`; its complement is unreachable.
    InvariantBlock {
        block: StateSet,
        image: StateSet,
        unreachable: StateSet,
    },
    /// The final Rystsov level is strongly connected.
    Level { k: usize, vertices: usize, edges: usize },
    Oracle {
        reachable: usize,
        total: usize,
        unreachable_sample: Vec<StateSet>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub answer: Answer,
    pub decided_by: DecidedBy,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn is_completely_reachable(&self) -> bool {
        self.answer == Answer::CompletelyReachable
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "verdict")]
pub enum Outcome {
    Decided(Verdict),
    /// None of the structural checks applied and the oracle was disabled.
    Inconclusive,
}

impl Outcome {
    pub fn verdict(&self) -> Option<&Verdict> {
        match self {
            Outcome::Decided(v) => Some(v),
            Outcome::Inconclusive => None,
        }
    }
}

/// Result of one pipeline stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Pass,
    PassWithWarning(String),
    Decided(Verdict),
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub oracle_fallback: bool,
    pub oracle_max_states: usize,
    pub group_cap: usize,
    pub block_lattice_cap: usize,
    pub strategy: Strategy,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            oracle_fallback: true,
            oracle_max_states: DEFAULT_MAX_STATES,
            group_cap: DEFAULT_GROUP_CAP,
            block_lattice_cap: DEFAULT_BLOCK_LATTICE_CAP,
            strategy: Strategy::default(),
        }
    }
}

fn not_cr(decided_by: DecidedBy, evidence: Evidence) -> Verdict {
    Verdict {
        answer: Answer::NotCompletelyReachable,
        decided_by,
        evidence,
    }
}

/// Fails when `e` does not reach every state under the permutation letters.
pub fn transitivity_check(n: usize, shape: &AlmostGroupShape, gens: &GeneratorSet) -> Check {
    let orbit = gens.orbit(shape.e).set;
    match orbit.complement(n).first() {
        None => Check::Pass,
        Some(q) => Check::Decided(not_cr(
            DecidedBy::Transitivity,
            Evidence::Orbit {
                orbit,
                missing: q + 1,
                unreachable: StateSet::singleton(q).complement(n),
            },
        )),
    }
}

/// Transitivity, then the first nontrivial block containing `e` that `a`
/// maps into itself. Also returns the blocks that were scanned.
pub fn necessary_check(
    a: &Automaton,
    shape: &AlmostGroupShape,
    gens: &GeneratorSet,
    lattice_cap: usize,
) -> (Check, Option<Vec<StateSet>>) {
    let n = a.n();
    if let c @ Check::Decided(_) = transitivity_check(n, shape, gens) {
        return (c, None);
    }
    let blocks = match gens.blocks_containing(shape.e, false, lattice_cap) {
        Ok(b) => b,
        Err(err) => return (Check::PassWithWarning(err.to_string()), None),
    };
    let letter = &a.letter(shape.defect_letter).map;
    for &b in &blocks {
        let image = letter.apply_set(b);
        if image.is_subset(b) {
            let v = not_cr(
                DecidedBy::InvariantBlock,
                Evidence::InvariantBlock {
                    block: b,
                    image,
                    unreachable: b.complement(n),
                },
            );
            return (Check::Decided(v), Some(blocks));
        }
    }
    (Check::Pass, Some(blocks))
}

pub fn sufficient_check(h: &RystsovHierarchy) -> Check {
    if h.stop_reason != StopReason::StronglyConnected {
        return Check::Pass;
    }
    let last = h.last();
    Check::Decided(Verdict {
        answer: Answer::CompletelyReachable,
        decided_by: DecidedBy::StronglyConnectedLevel(last.k),
        evidence: Evidence::Level {
            k: last.k,
            vertices: last.vertices.len(),
            edges: last.edges.len(),
        },
    })
}

/// Core data of `leaf(C_e)` at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreLevelResult {
    pub level: usize,
    pub block: StateSet,
    pub blocks_in_system: usize,
    pub core_order: usize,
    pub transitive: bool,
}

/// When every `leaf(C_e^{[ℓ]})` has a core transitive on it, the final
/// `leaf(C_e)` must be `a`-invariant; a failure of that is reported as
/// [`Error::TheoremViolation`].
pub fn core_invariance_check(
    a: &Automaton,
    shape: &AlmostGroupShape,
    gens: &GeneratorSet,
    h: &RystsovHierarchy,
    group_cap: usize,
    strategy: Strategy,
) -> Result<(Check, Vec<CoreLevelResult>)> {
    if h.stop_reason == StopReason::StronglyConnected {
        return Ok((Check::Pass, Vec::new()));
    }
    let group = gens.enumerate_group_with(group_cap, strategy);
    if !group.is_complete() {
        return Ok((
            Check::PassWithWarning(Error::IncompleteGroup(group_cap).to_string()),
            Vec::new(),
        ));
    }
    let mut results = Vec::new();
    for level in &h.levels {
        let block = level.c_e_foliage();
        let system = gens
            .system_from_block(block)
            .map_err(|err| Error::TheoremViolation(format!("leaf(C_e) at level {} is not a block: {err}", level.k)))?;
        let core = group.core_of_system(&system)?;
        results.push(CoreLevelResult {
            level: level.k,
            block,
            blocks_in_system: system.blocks.len(),
            core_order: core.len(),
            transitive: core.is_transitive_on(block),
        });
    }
    if !results.iter().all(|r| r.transitive) {
        return Ok((Check::Pass, results));
    }
    let last = h.last();
    let block = last.c_e_foliage();
    let image = a.letter(shape.defect_letter).map.apply_set(block);
    if !image.is_subset(block) {
        return Err(Error::TheoremViolation(format!(
            "cores transitive through level {} but {} · a = {} is not contained in it",
            last.k, block, image
        )));
    }
    let v = not_cr(
        DecidedBy::CoreTransitiveInvariance(last.k),
        Evidence::InvariantBlock {
            block,
            image,
            unreachable: block.complement(a.n()),
        },
    );
    Ok((Check::Decided(v), results))
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeSummary {
    pub permutation_letters: Vec<String>,
    pub defect_letter: String,
    /// 1-indexed.
    pub excluded_state: usize,
    pub duplicated_state: usize,
    pub collapsed_pair: [usize; 2],
    pub standardized: bool,
}

impl ShapeSummary {
    fn new(a: &Automaton, s: &AlmostGroupShape) -> ShapeSummary {
        ShapeSummary {
            permutation_letters: s.perm_letters.iter().map(|&i| a.letter(i).name.clone()).collect(),
            defect_letter: a.letter(s.defect_letter).name.clone(),
            excluded_state: s.e + 1,
            duplicated_state: s.d + 1,
            collapsed_pair: [s.coll.0 + 1, s.coll.1 + 1],
            standardized: s.standardized,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeSummary {
    pub source: StateSet,
    pub target: StateSet,
    pub witness: String,
    pub excl: StateSet,
    pub dupl: StateSet,
    pub carried: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub k: usize,
    pub vertices: Vec<StateSet>,
    pub edges: Vec<EdgeSummary>,
    pub components: Vec<StateSet>,
    pub c_e: StateSet,
    pub strongly_connected: bool,
}

impl LevelSummary {
    pub fn new(a: &Automaton, level: &crate::rystsov::RystsovLevel) -> LevelSummary {
        LevelSummary {
            k: level.k,
            vertices: level.vertices.iter().map(|v| v.foliage).collect(),
            edges: level
                .edges
                .iter()
                .map(|e| EdgeSummary {
                    source: level.vertices[e.source].foliage,
                    target: level.vertices[e.target].foliage,
                    witness: a.format_word(&e.witness),
                    excl: e.profile.excl,
                    dupl: e.profile.dupl,
                    carried: e.carried,
                })
                .collect(),
            components: (0..level.scc.len()).map(|c| level.scc_foliage(c)).collect(),
            c_e: level.c_e_foliage(),
            strongly_connected: level.is_strongly_connected(),
        }
    }
}

/// Everything the pipeline computed, 1-indexed throughout.
#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub states: usize,
    pub shape: ShapeSummary,
    /// Word `u` such that the defect letter was replaced by `u a`; `None` if
    /// the pipeline stopped before standardizing.
    pub standardization_word: Option<String>,
    pub transitive: bool,
    pub blocks_containing_e: Option<Vec<StateSet>>,
    pub levels: Vec<LevelSummary>,
    pub stop_reason: Option<StopReason>,
    pub core_checks: Vec<CoreLevelResult>,
    pub warnings: Vec<String>,
    pub outcome: Outcome,
}

/// Runs the full pipeline. Shape errors and the oracle state cap propagate.
pub fn decide(a: &Automaton, options: &DecideOptions) -> Result<(Outcome, PipelineReport)> {
    let shape = classify_shape(a)?;
    let gens = shape.generators(a);
    let mut report = PipelineReport {
        states: a.n(),
        shape: ShapeSummary::new(a, &shape),
        standardization_word: None,
        transitive: gens.is_transitive(),
        blocks_containing_e: None,
        levels: Vec::new(),
        stop_reason: None,
        core_checks: Vec::new(),
        warnings: Vec::new(),
        outcome: Outcome::Inconclusive,
    };
    let finish = |mut report: PipelineReport, outcome: Outcome| {
        report.outcome = outcome.clone();
        Ok((outcome, report))
    };

    if let Check::Decided(v) = transitivity_check(a.n(), &shape, &gens) {
        return finish(report, Outcome::Decided(v));
    }

    let (std, u) = standardize(a, &shape)?;
    let std_shape = classify_shape(&std)?;
    report.standardization_word = Some(if u.is_empty() { String::new() } else { a.format_word(&u) });

    let (check, blocks) = necessary_check(&std, &std_shape, &gens, options.block_lattice_cap);
    report.blocks_containing_e = blocks;
    match check {
        Check::Decided(v) => return finish(report, Outcome::Decided(v)),
        Check::PassWithWarning(w) => report.warnings.push(w),
        Check::Pass => {}
    }

    let h = build_hierarchy_with(&std, &std_shape, options.strategy)?;
    report.levels = h.levels.iter().map(|l| LevelSummary::new(&std, l)).collect();
    report.stop_reason = Some(h.stop_reason);
    if let Check::Decided(v) = sufficient_check(&h) {
        return finish(report, Outcome::Decided(v));
    }

    let (check, cores) = core_invariance_check(&std, &std_shape, &gens, &h, options.group_cap, options.strategy)?;
    report.core_checks = cores;
    match check {
        Check::Decided(v) => return finish(report, Outcome::Decided(v)),
        Check::PassWithWarning(w) => report.warnings.push(w),
        Check::Pass => {}
    }

    if !options.oracle_fallback {
        return finish(report, Outcome::Inconclusive);
    }
    let table = oracle::reachable_subsets_with(a, options.oracle_max_states, options.strategy)?;
    let total = (1usize << a.n()) - 1;
    let verdict = Verdict {
        answer: if table.is_completely_reachable() {
            Answer::CompletelyReachable
        } else {
            Answer::NotCompletelyReachable
        },
        decided_by: DecidedBy::Oracle,
        evidence: Evidence::Oracle {
            reachable: table.reachable_count(),
            total,
            unreachable_sample: table.unreachable(8),
        },
    };
    finish(report, Outcome::Decided(verdict))
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let answer = match self.answer {
            Answer::CompletelyReachable => "completely reachable",
            Answer::NotCompletelyReachable => "not completely reachable",
        };
        write!(f, "{answer} (")?;
        match (&self.decided_by, &self.evidence) {
            (DecidedBy::Transitivity, Evidence::Orbit { missing, .. }) => write!(
                f,
                "permutation group not transitive; state {missing} outside the orbit of e"
            )?,
            (DecidedBy::InvariantBlock, Evidence::InvariantBlock { block, unreachable, .. }) => {
                write!(f, "invariant block {block}; {unreachable} unreachable")?
            }
            (DecidedBy::StronglyConnectedLevel(k), _) => write!(f, "strongly connected at level {k}")?,
            (DecidedBy::CoreTransitiveInvariance(k), Evidence::InvariantBlock { block, .. }) => {
                write!(f, "transitive cores, invariant block {block} at level {k}")?
            }
            (DecidedBy::Oracle, Evidence::Oracle { reachable, total, .. }) => {
                write!(f, "oracle: {reachable} of {total} subsets reachable")?
            }
            (by, _) => write!(f, "{by:?}")?,
        }
        f.write_str(")")
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Decided(v) => v.fmt(f),
            Outcome::Inconclusive => f.write_str("inconclusive under the structural checks (oracle fallback disabled)"),
        }
    }
}
