//! Lockbench: threads alternate a critical section and a non-critical section
//! of uniformly distributed length on one shared lock, for a fixed wall time.
//!
//! Throughput is critical sections per second. Synchronization cost is the CPU
//! time threads spend inside acquire and release, read from the per-thread CPU
//! clock, so time asleep is free and time spinning is not. The critical
//! section body itself is not charged.

mod busy;
mod config;
mod cputime;
mod harness;
mod sampler;

use thiserror::Error;

pub use busy::{busy_work, iterations_per_us};
pub use config::{BenchConfig, LockKind};
pub use cputime::{pin_to_core, thread_cpu_time};
pub use harness::{
    run_bench, run_once, run_series, write_csv, BenchRecord, BenchResult, ThreadStats,
};
pub use sampler::{thread_seed, WorkloadSampler};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("benchmark needs at least one thread")]
    NoThreads,
    #[error("duration must be positive")]
    ZeroDuration,
    #[error("at least one run is required")]
    ZeroRuns,
    #[error("invalid interval [{low}, {high})")]
    BadInterval { low: f64, high: f64 },
    #[error("mutable lock needs a positive period and window ceiling")]
    BadMutlockParams,
    #[error("unknown lock `{0}` (expected mutlock, ttas, mcs, sleep or adaptive_sleep)")]
    UnknownLock(String),
    #[error("could not spawn worker {index}: {reason}")]
    Spawn { index: usize, reason: String },
}
