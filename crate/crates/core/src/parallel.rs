//! Execution mode selection.
//!
//! With the `parallel` feature (default) amplitude kernels and batch sweeps
//! run on rayon; without it every entry point falls back to the sequential
//! path. Both paths produce bit-identical results: kernels are elementwise
//! and reductions use fixed chunk boundaries summed in order.

/// Amplitude count per reduction chunk.
pub(crate) const REDUCE_CHUNK: usize = 1 << 12;

/// Registers narrower than this run sequentially under [`ExecMode::auto`].
pub const PARALLEL_MIN_QUBITS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExecMode {
    #[default]
    Sequential,
    Parallel,
}

impl ExecMode {
    /// Parallel for wide registers when the feature is enabled.
    pub fn auto(width: usize) -> Self {
        if cfg!(feature = "parallel") && width >= PARALLEL_MIN_QUBITS {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }

    /// Whether rayon is actually used. Always false without the feature.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

/// Order-preserving map over independent jobs.
pub fn map_jobs<T, R, F>(items: Vec<T>, mode: ExecMode, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = mode;
    items.into_iter().map(f).collect()
}

/// Batch-level default: parallel whenever the feature is on.
pub fn batch_mode() -> ExecMode {
    if cfg!(feature = "parallel") {
        ExecMode::Parallel
    } else {
        ExecMode::Sequential
    }
}
