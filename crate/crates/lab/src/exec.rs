//! Rayon-backed executor. Results come back in index order, so reports do
//! not depend on the worker count.

use rayon::prelude::*;
use tgasum_core::search::Executor;

#[derive(Clone, Copy, Debug, Default)]
pub struct RayonExecutor;

impl Executor for RayonExecutor {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).into_par_iter().map(f).collect()
    }
}
