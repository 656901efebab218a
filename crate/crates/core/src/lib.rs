//! Complete reachability of almost-group automata.
//!
//! An almost-group automaton has permutation letters plus exactly one letter
//! of defect 1. This crate classifies such automata, computes the blocks of
//! imprimitivity of the permutation group, builds the Rystsov graph hierarchy,
//! and decides complete reachability, with an exhaustive power-set search as
//! ground truth.

pub mod automaton;
pub mod cli;
pub mod decision;
pub mod error;
pub mod format;
pub mod oracle;
pub mod par;
pub mod perm_group;
pub mod random;
pub mod rystsov;
pub mod scc;
pub mod state_set;

pub use automaton::{classify_shape, standardize, AlmostGroupShape, Automaton, Letter, Transformation, Word};
pub use decision::{decide, DecideOptions, Outcome, PipelineReport, Verdict};
pub use error::{Error, Result};
pub use format::{parse_automaton, serialize_automaton};
pub use par::Strategy;
pub use state_set::{StateId, StateSet};
