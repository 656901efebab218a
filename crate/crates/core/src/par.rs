//! Execution strategy for the data-parallel inner loops.
//!
//! Every breadth-first search in the crate expands one layer at a time: the
//! successors of a layer are computed with [`map_layer`] and then merged
//! sequentially in layer order. The merge is what fixes discovery order, so
//! both strategies produce identical results, witnesses included.

/// How layer expansions and batch jobs are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled; otherwise the same as
    /// `Sequential`.
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

/// Below this many items the parallel path is not worth the scheduling cost.
/// With a single rayon thread both functions always take the sequential path.
#[cfg(feature = "parallel")]
const PAR_THRESHOLD: usize = 256;

/// Order-preserving map over a slice.
pub fn map_layer<T, U, F>(strategy: Strategy, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel if items.len() >= PAR_THRESHOLD && rayon::current_num_threads() > 1 => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Order-preserving map for coarse-grained jobs (one automaton per item).
pub fn map_jobs<T, U, F>(strategy: Strategy, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel if rayon::current_num_threads() > 1 => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}
