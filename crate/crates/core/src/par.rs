//! Data-parallel fill over per-node output slots.
//!
//! With the `parallel` feature (default) work runs on a rayon pool; without
//! it every [`Parallelism`] setting degrades to the sequential loop. Each slot
//! is written by exactly one closure call that reads only immutable inputs, so
//! the result never depends on the worker count.

use crate::error::{Error, Result};

/// Requested worker configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    #[default]
    Sequential,
    /// A dedicated pool with this many workers; 0 means one per core.
    Threads(usize),
}

impl Parallelism {
    pub fn threads(n: usize) -> Self {
        if n == 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Threads(n)
        }
    }
}

const MIN_CHUNK: usize = 2048;

pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    pub fn sequential() -> Self {
        Executor {
            #[cfg(feature = "parallel")]
            pool: None,
        }
    }

    #[cfg(feature = "parallel")]
    pub fn new(par: Parallelism) -> Result<Self> {
        match par {
            Parallelism::Sequential => Ok(Self::sequential()),
            Parallelism::Threads(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidParam(format!("thread pool: {e}")))?;
                Ok(Executor { pool: Some(pool) })
            }
        }
    }

    #[cfg(not(feature = "parallel"))]
    pub fn new(_par: Parallelism) -> Result<Self> {
        Ok(Self::sequential())
    }

    /// Number of workers actually used.
    pub fn workers(&self) -> usize {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.current_num_threads();
        }
        1
    }

    /// `out[i] = f(i)` for every slot.
    pub fn fill<F>(&self, out: &mut [f64], f: F)
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            pool.install(|| {
                out.par_iter_mut()
                    .with_min_len(MIN_CHUNK)
                    .enumerate()
                    .for_each(|(i, o)| *o = f(i));
            });
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(i);
        }
    }

    /// Maps independent jobs, preserving input order in the output.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| items.par_iter().map(&f).collect());
        }
        items.iter().map(f).collect()
    }
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers())
            .finish()
    }
}
