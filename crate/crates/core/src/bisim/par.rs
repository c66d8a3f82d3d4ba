//! Data-parallel evaluation of per-pair predicates.

use serde::{Deserialize, Serialize};

/// How the refinement rounds evaluate pairs. Without the `parallel`
/// feature both variants run sequentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parallelism {
    Sequential,
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

/// Evaluates `f` on `0..n`.
pub(crate) fn map<F>(n: usize, mode: Parallelism, f: F) -> Vec<bool>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().with_min_len(256).map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
