//! Execution policy for the data-parallel loops (census branches, sub-series
//! cells). With the `parallel` feature off, [`Execution::Parallel`] silently
//! runs sequentially.
//!
//! Results are always gathered in input order, so the output does not depend
//! on the policy.

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run work on multiple threads.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Send + Sync,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.into_par_iter().map(f).collect()
            }
            _ => items.into_iter().map(f).collect(),
        }
    }

    /// Maps fallibly and reports the error of the earliest failing item, so
    /// the error is the same whichever policy ran.
    pub fn try_map<T, R, F>(self, items: Vec<T>, f: F) -> Result<Vec<R>>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> Result<R> + Send + Sync,
    {
        self.map(items, f).into_iter().collect()
    }
}
