//! Mutable locks: a hybrid spin/sleep lock that keeps at most a bounded,
//! self-tuning number of waiters spinning and parks the rest, waking one
//! sleeper ahead of time at each release so its wake-up latency overlaps the
//! next critical section.
//!
//! The crate also carries the baseline locks it is measured against
//! ([`primitives`]), a slot model of the waiting policies ([`model`]), the
//! lockbench harness ([`bench`]) and the metrics computed over its output
//! ([`report`]).
//!
//! ```
//! use std::sync::Arc;
//! use std::thread;
//!
//! use mutlock::MutableLock;
//!
//! let lock = Arc::new(MutableLock::with_params(4, 10).unwrap());
//! let handles: Vec<_> = (0..4)
//!     .map(|_| {
//!         let lock = Arc::clone(&lock);
//!         thread::spawn(move || {
//!             for _ in 0..100 {
//!                 let _guard = lock.lock();
//!             }
//!         })
//!     })
//!     .collect();
//! for h in handles {
//!     h.join().unwrap();
//! }
//! assert_eq!(lock.snapshot().thc(), 0);
//! ```

pub mod bench;
pub mod model;
mod mutable;
pub mod primitives;
mod raw;
pub mod report;
pub mod scalar;
pub mod state;

pub use mutable::{
    default_max_sws, AcquireTrace, LockConfigError, MutableLock, MutableLockGuard, DEFAULT_PERIOD,
};
pub use raw::RawLock;
pub use scalar::Scalar;
pub use state::{clamp_delta, wuc_adjust, LockState, ReleaseDecision, SwsDelta, SwsOracle};

/// Exact rational used for golden-value checks of the derived metrics.
pub type Exact = num_rational::Ratio<i64>;

/// Aggregated bench row over measured (`f64`) data.
pub type AggregateRow = report::AggregateRow<f64>;
/// Aggregated bench row over exact rationals.
pub type ExactAggregateRow = report::AggregateRow<Exact>;
pub type LockRatio = report::LockRatio<f64>;
