//! Exact-arithmetic verification engines for truncated q-hypergeometric
//! congruences.
//!
//! The library checks congruences of the shape
//!
//! ```text
//!     sum_{k=0}^{K} t(q, k)  ==  prefactor(q) * sum_{k=0}^{K'} t(q^n, k)
//!         (mod Phi_{n^1}(q) ... Phi_{n^r}(q)^e)
//! ```
//!
//! where `t` ranges over a fixed catalog of q-Pochhammer summands, together
//! with their p-adic limits `q -> 1` (supercongruences for truncated
//! hypergeometric sums, Morita Gamma function identities, and Dwork-type
//! coefficient congruences for the associated power series).
//!
//! Two independent engines decide each cyclotomic congruence:
//!
//! * a dense oracle that builds both sides as exact rational functions in
//!   `Z[q]` and counts `Phi_N`-factors of the cross-multiplied difference
//!   ([`statements::Engine::Dense`]);
//! * a localization engine that works with unit parts modulo `Phi_N^w` and
//!   tracks valuations exactly, never forming the full polynomials
//!   ([`statements::Engine::Local`]).
//!
//! Agreement of the two engines on a shared grid is part of the test suite.
//!
//! Verification sweeps over parameter grids are data-parallel; the `parallel`
//! feature (on by default) runs them on a rayon pool, and without it the same
//! API degrades to sequential iteration.

pub mod arith;
pub mod error;
pub mod localring;
pub mod padic;
pub mod polyring;
pub mod qcomb;
pub mod report;
pub mod statements;
pub mod summand;
pub mod sweep;

pub use error::QdError;

/// Whether grid runs fan out over a rayon thread pool or stay on the calling
/// thread. With the `parallel` feature disabled both variants are sequential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Parallel,
    Sequential,
}

/// Cap the worker count for all subsequent parallel grid runs. `None` keeps
/// the default (one worker per core). Without the `parallel` feature this is
/// a no-op; calling it twice keeps the first setting.
pub fn configure_jobs(jobs: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
    }
}

/// Map over a grid honoring [`ExecMode`].
///
/// The closure must be `Sync + Send` because the parallel path shares it
/// across worker threads; results come back in input order.
pub fn grid_map<T, U, F>(mode: ExecMode, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel => items.into_iter().map(f).collect(),
        ExecMode::Sequential => items.into_iter().map(f).collect(),
    }
}
