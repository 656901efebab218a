use thiserror::Error;

use crate::state_set::StateSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("transformation length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("not an almost-group automaton: {0}")]
    NotAlmostGroup(String),

    #[error("collapsed pair is only defined for defect 1 (defect is {0})")]
    DefectNotOne(usize),

    #[error("cannot standardize: no permutation word maps the excluded state into the collapsed pair")]
    CannotStandardize,

    #[error("generator set is not transitive")]
    NotTransitive,

    #[error("{0} is not a block: some image overlaps it partially")]
    NotABlock(StateSet),

    #[error("block lattice too large (cap {0})")]
    BlockLatticeTooLarge(usize),

    #[error("group enumeration incomplete (cap {0})")]
    IncompleteGroup(usize),

    #[error("{n} states exceeds the limit of {cap}")]
    TooManyStates { n: usize, cap: usize },

    #[error("subset {0} is not reachable")]
    Unreachable(StateSet),

    #[error("level {0} out of range")]
    LevelOutOfRange(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A proven implication failed on a concrete instance; indicates a bug.
    #[error("internal theorem violation: {0}")]
    TheoremViolation(String),
}

impl Error {
    /// Whether the error comes from a configured resource cap rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::BlockLatticeTooLarge(_) | Error::IncompleteGroup(_) | Error::TooManyStates { .. }
        )
    }
}
