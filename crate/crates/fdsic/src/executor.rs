use anyhow::{Context, Result};
use fdsic_core::sim::PacketExecutor;
use rayon::prelude::*;

/// Runs packets on a dedicated rayon pool. Results come back in packet order,
/// so output does not depend on the thread count.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `jobs = None` uses one thread per available core.
    pub fn new(jobs: Option<usize>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = jobs {
            anyhow::ensure!(n > 0, "--jobs must be at least 1");
            builder = builder.num_threads(n);
        }
        let pool = builder.build().context("building the worker pool")?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl PacketExecutor for RayonExecutor {
    fn map_packets<T, F>(&self, n_packets: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n_packets).into_par_iter().map(f).collect())
    }
}
