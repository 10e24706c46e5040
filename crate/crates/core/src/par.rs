//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] maps through
//! rayon; without it both variants run on the calling thread. Results are
//! always returned in input order, so callers see identical output either way.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this build can actually run work on a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Work counter shared by the workers of one top-level computation.
///
/// Work is measured in backtracking nodes (candidate vectors examined), not
/// wall time, so a given budget fails or succeeds identically on every run.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Self {
            limit,
            used: AtomicU64::new(0),
        }
    }

    pub fn unlimited() -> Self {
        Self::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn charge(&self, nodes: u64) -> crate::Result<()> {
        let used = self
            .used
            .fetch_add(nodes, Ordering::Relaxed)
            .saturating_add(nodes);
        if used > self.limit {
            Err(Error::BudgetExceeded {
                used,
                budget: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving fallible map; the first error in input order wins.
pub fn try_map<T, R, E, F>(exec: Execution, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(exec, items, f).into_iter().collect()
}

/// Sum of a fallible `u64` map over an index range, with checked addition.
pub fn try_sum_range<E, F>(
    exec: Execution,
    range: std::ops::Range<usize>,
    overflow: impl Fn() -> E + Sync + Send,
    f: F,
) -> Result<u64, E>
where
    E: Send,
    F: Fn(usize) -> Result<u64, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return range
            .into_par_iter()
            .map(&f)
            .try_reduce(|| 0u64, |a, b| a.checked_add(b).ok_or_else(&overflow));
    }
    let _ = exec;
    let mut total = 0u64;
    for i in range {
        total = total.checked_add(f(i)?).ok_or_else(&overflow)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Sequential, &xs, |x| x * x);
        let b = map(Execution::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        let s1: Result<u64, ()> = try_sum_range(Execution::Sequential, 0..100, || (), |i| Ok(i as u64));
        let s2: Result<u64, ()> = try_sum_range(Execution::Parallel, 0..100, || (), |i| Ok(i as u64));
        assert_eq!(s1.ok(), Some(4950));
        assert_eq!(s2.ok(), Some(4950));
    }

    #[test]
    fn budget_trips() {
        let b = Budget::new(10);
        assert!(b.charge(10).is_ok());
        assert!(matches!(b.charge(1), Err(Error::BudgetExceeded { used: 11, budget: 10 })));
    }
}
