//! Scheduling helpers shared by the graded engines.

use crate::linalg::Strategy;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `items.map(op).collect()`, on the rayon pool when allowed.
pub(crate) fn map_collect<T, R, G>(items: Vec<T>, strategy: Strategy, op: G) -> Vec<R>
where
    T: Send,
    R: Send,
    G: Fn(T) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if strategy == Strategy::Parallel {
        return items.into_par_iter().map(op).collect();
    }
    let _ = strategy;
    items.into_iter().map(op).collect()
}
