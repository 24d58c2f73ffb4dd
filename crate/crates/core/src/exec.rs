//! Sequential / parallel evaluation switch.

/// How data-parallel inner loops are evaluated.
///
/// `Parallel` uses rayon when the crate is built with the `parallel`
/// feature and silently degrades to sequential evaluation otherwise, so
/// results never depend on the mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Index of the minimum of `f` over `items`; ties go to the lowest index.
    pub fn argmin_by_key<T, F>(self, items: &[T], f: F) -> Option<(usize, f64)>
    where
        T: Sync,
        F: Fn(&T) -> f64 + Sync + Send,
    {
        let better = |a: (usize, f64), b: (usize, f64)| match a.1.total_cmp(&b.1) {
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Equal => {
                if a.0 <= b.0 {
                    a
                } else {
                    b
                }
            }
        };
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items
                    .par_iter()
                    .enumerate()
                    .map(|(i, t)| (i, f(t)))
                    .reduce_with(better)
            }
            _ => items
                .iter()
                .enumerate()
                .map(|(i, t)| (i, f(t)))
                .reduce(better),
        }
    }
}
