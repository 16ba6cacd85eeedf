//! Execution mode for the data-parallel loops.
//!
//! With the `parallel` feature, loops run on rayon; without it every mode
//! degrades to a plain sequential loop. Results never depend on the mode.

/// How the data-parallel loops run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// `threads = None` uses the global rayon pool.
    Parallel { threads: Option<usize> },
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel { threads: None }
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `jobs = 1` is sequential, `0` means all cores.
    pub fn from_jobs(jobs: usize) -> Self {
        match jobs {
            1 => Execution::Sequential,
            0 => Execution::Parallel { threads: None },
            n => Execution::Parallel { threads: Some(n) },
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && matches!(self, Execution::Parallel { .. })
    }

    /// Maps `f` over `items`, keeping input order.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            match self {
                Execution::Sequential => items.iter().map(f).collect(),
                Execution::Parallel { threads: None } => items.par_iter().map(f).collect(),
                Execution::Parallel {
                    threads: Some(n), ..
                } => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    Ok(pool) => pool.install(|| items.par_iter().map(f).collect()),
                    Err(_) => items.par_iter().map(f).collect(),
                },
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            items.iter().map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_order() {
        let xs: Vec<u64> = (0..1000).collect();
        for exec in [
            Execution::Sequential,
            Execution::Parallel { threads: None },
            Execution::Parallel { threads: Some(3) },
        ] {
            assert_eq!(exec.map(&xs, |x| x * x), xs.iter().map(|x| x * x).collect::<Vec<_>>());
        }
    }
}
