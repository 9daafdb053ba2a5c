//! Execution strategy for the data-parallel inner loops.
//!
//! Every hot loop in the crate (grid analyses, distance scans, Monte Carlo
//! sampling) goes through [`Exec`]. With the `parallel` feature enabled,
//! [`Exec::Parallel`] dispatches to rayon; without it, both variants run the
//! same sequential iterator. Results are collected in index order, so the
//! output never depends on the schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True if this strategy will actually run on the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `(0..len).map(f)` collected in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Maximum of `f(i)` over `0..len`; `f64::NEG_INFINITY` for an empty range.
    /// NaN values are ignored.
    pub fn max<F>(self, len: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..len)
                .into_par_iter()
                .map(f)
                .reduce(|| f64::NEG_INFINITY, f64::max);
        }
        (0..len).map(f).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the largest `f(i)`, lowest index on ties.
    pub fn argmax<F>(self, len: usize, f: F) -> Option<(usize, f64)>
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let better = |a: (usize, f64), b: (usize, f64)| {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        };
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..len)
                .into_par_iter()
                .map(|i| (i, f(i)))
                .reduce_with(better);
        }
        (0..len).map(|i| (i, f(i))).reduce(better)
    }

    /// In-place update of every element of `data`, chunked by `stride`.
    pub fn for_each_chunk<T, F>(self, data: &mut [T], stride: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            data.par_chunks_mut(stride)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
        data.chunks_mut(stride).enumerate().for_each(|(i, c)| f(i, c));
    }

    /// Concatenation of `f(i)` over `0..len`, in index order.
    pub fn flat_map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> Vec<T> + Sync + Send,
    {
        self.map(len, f).into_iter().flatten().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let f = |i: usize| ((i * 7919) % 1013) as f64 * 0.5;
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(exec.map(1000, f), (0..1000).map(f).collect::<Vec<_>>());
            assert_eq!(exec.max(1000, f), 1012.0 * 0.5);
            assert_eq!(exec.argmax(1000, f).unwrap().1, 506.0);
        }
        assert_eq!(Exec::Sequential.argmax(0, f), None);
        assert_eq!(Exec::Parallel.max(0, f), f64::NEG_INFINITY);
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        let f = |i: usize| if i % 10 == 3 { 1.0 } else { 0.0 };
        assert_eq!(Exec::Parallel.argmax(500, f).unwrap().0, 3);
        assert_eq!(Exec::Sequential.argmax(500, f).unwrap().0, 3);
    }

    #[test]
    fn chunked_update() {
        let mut v = vec![0usize; 30];
        Exec::Parallel.for_each_chunk(&mut v, 3, |i, c| c.iter_mut().for_each(|x| *x = i));
        assert_eq!(v[29], 9);
        assert_eq!(v[0], 0);
    }
}
