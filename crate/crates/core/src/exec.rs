//! Sequential or data-parallel mapping with order-preserving collection.
//!
//! Results always come back in input order, so any reduction performed
//! afterwards is deterministic regardless of the execution mode. Without the
//! `parallel` feature, `Parallel` silently runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn map_collect<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel && items.len() > 1 {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Like `map_collect`, falling back to sequential below `min_len` items.
    pub fn map_collect_min<T, R, F>(self, items: &[T], min_len: usize, f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        if items.len() < min_len {
            Execution::Sequential.map_collect(items, f)
        } else {
            self.map_collect(items, f)
        }
    }
}
