//! Data-parallel execution helpers.
//!
//! Every helper takes an [`Exec`] so callers (and the benches) can pick the
//! sequential path at runtime. Without the `parallel` feature both variants
//! run sequentially.

/// Execution mode for grid-wide loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

#[cfg(feature = "parallel")]
const MIN_CHUNK: usize = 256;

impl Exec {
    /// Whether this mode actually fans out to worker threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `out[i] = f(i)` for every index.
    pub fn fill<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            out.par_iter_mut()
                .with_min_len(MIN_CHUNK)
                .enumerate()
                .for_each(|(i, o)| *o = f(i));
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(i);
        }
    }

    /// Three outputs at once: `(a[i], b[i], c[i]) = f(i)`.
    pub fn fill3<F>(self, a: &mut [f64], b: &mut [f64], c: &mut [f64], f: F)
    where
        F: Fn(usize) -> (f64, f64, f64) + Sync + Send,
    {
        assert!(a.len() == b.len() && b.len() == c.len());
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            (a, b, c)
                .into_par_iter()
                .with_min_len(MIN_CHUNK)
                .enumerate()
                .for_each(|(i, (x, y, z))| {
                    let (p, q, r) = f(i);
                    *x = p;
                    *y = q;
                    *z = r;
                });
            return;
        }
        for i in 0..a.len() {
            let (p, q, r) = f(i);
            a[i] = p;
            b[i] = q;
            c[i] = r;
        }
    }

    /// Collects `f(i)` for `i in 0..n` in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().with_min_len(MIN_CHUNK).map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Maps independent jobs (e.g. sweep points); each job may be expensive.
    pub fn map_jobs<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}
