//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Schedule::Parallel`] fans
//! work out over the rayon pool. Without it, both schedules run sequentially.
//! Callers must produce identical results under either schedule.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Sequential,
    #[default]
    Parallel,
}

/// Below this many items the parallel path is not worth the fork.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_LEN: usize = 64;

/// Applies `f` to every element (with its index) and collects the results in
/// order.
pub fn map_mut<T, R, F>(schedule: Schedule, items: &mut [T], f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, &mut T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if schedule == Schedule::Parallel && items.len() >= MIN_PARALLEL_LEN {
        use rayon::prelude::*;
        return items.par_iter_mut().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let _ = schedule;
    items.iter_mut().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(schedule: Schedule, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if schedule == Schedule::Parallel && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(&f).collect();
    }
    let _ = schedule;
    items.iter().map(f).collect()
}

/// Number of worker threads a parallel schedule would use.
pub fn num_threads() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();
    #[cfg(not(feature = "parallel"))]
    return 1;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let a = map(Schedule::Sequential, &items, |x| x * x);
        let b = map(Schedule::Parallel, &items, |x| x * x);
        assert_eq!(a, b);
        let mut xs = items.clone();
        let mut ys = items.clone();
        let c = map_mut(Schedule::Sequential, &mut xs, |i, x| {
            *x += 1;
            i as u64 + *x
        });
        let d = map_mut(Schedule::Parallel, &mut ys, |i, x| {
            *x += 1;
            i as u64 + *x
        });
        assert_eq!((c, xs), (d, ys));
    }
}
