//! The mutable lock: a hybrid spin/sleep lock whose number of spinning waiters
//! is bounded by an adaptive spinning window.
//!
//! A thread arriving at the lock bumps `thc` in the packed state word. If the
//! count it displaced is below the current window size it spins on the inner
//! spin lock, otherwise it sleeps on the semaphore first. Every release wakes
//! one sleeper as soon as a window slot frees up, so the woken thread pays its
//! wake-up latency while the next spinner runs the critical section.
//!
//! The window is resized by [`SwsOracle`] from inside the inner lock. A resize
//! may leave sleepers inside the window (growth) or spinners outside it
//! (shrink); the signed wake-up count `wuc` repairs both over the following
//! releases.

use std::cell::UnsafeCell;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use crossbeam_utils::CachePadded;
use thiserror::Error;

use crate::primitives::{SleepQueue, TtasLock};
use crate::raw::RawLock;
use crate::state::{clamp_delta, sws_increment, wuc_adjust, LockState, ReleaseDecision, SwsOracle};

/// Oracle period used when none is given.
pub const DEFAULT_PERIOD: u32 = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LockConfigError {
    #[error("maximum window size must be at least 1")]
    ZeroMaxSws,
    #[error("oracle period must be at least 1")]
    ZeroPeriod,
}

/// Slock-protected metadata.
struct Meta {
    wuc: i64,
    oracle: SwsOracle,
}

/// What one `acquire` did, for instrumentation and tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AcquireTrace {
    /// State before this thread's arrival was counted.
    pub arrival: LockState,
    pub slept: bool,
    pub spun: bool,
    /// Window change applied by this acquire (0 when none or dropped as stale).
    pub applied_delta: i64,
}

pub struct MutableLock {
    lstate: CachePadded<AtomicU64>,
    slock: TtasLock,
    meta: UnsafeCell<Meta>,
    sleepq: SleepQueue,
    max: u32,
}

// SAFETY: `meta` is only touched by the thread holding `slock`
unsafe impl Sync for MutableLock {}
unsafe impl Send for MutableLock {}

impl Default for MutableLock {
    fn default() -> Self {
        Self::new()
    }
}

/// Number of logical cores, the default window ceiling.
pub fn default_max_sws() -> u32 {
    thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
        .try_into()
        .unwrap_or(u32::MAX)
}

impl MutableLock {
    /// Lock with the window ceiling at the core count and oracle period 10.
    pub fn new() -> Self {
        Self::with_params(default_max_sws(), DEFAULT_PERIOD).expect("defaults are valid")
    }

    pub fn with_params(max_sws: u32, period: u32) -> Result<Self, LockConfigError> {
        if max_sws == 0 {
            return Err(LockConfigError::ZeroMaxSws);
        }
        if period == 0 {
            return Err(LockConfigError::ZeroPeriod);
        }
        Ok(MutableLock {
            lstate: CachePadded::new(AtomicU64::new(LockState::pack(1, 0).word())),
            slock: TtasLock::new(),
            meta: UnsafeCell::new(Meta {
                wuc: 0,
                oracle: SwsOracle::new(period),
            }),
            sleepq: SleepQueue::new(),
            max: max_sws,
        })
    }

    pub fn max_sws(&self) -> u32 {
        self.max
    }

    /// Racy view of `<sws, thc>`.
    pub fn snapshot(&self) -> LockState {
        LockState::from_word(self.lstate.load(Ordering::Acquire))
    }

    pub fn acquire(&self) {
        self.acquire_traced();
    }

    pub fn acquire_traced(&self) -> AcquireTrace {
        let arrival = LockState::from_word(self.lstate.fetch_add(1, Ordering::SeqCst));
        let (sws, thc_prev) = arrival.unpack();
        debug_assert!(
            thc_prev < i32::MAX as u32,
            "too many threads on one MutableLock"
        );

        let slept = thc_prev >= sws;
        if slept {
            self.sleepq.sleep();
        }
        let spun = self.slock.lock();
        let mut trace = AcquireTrace {
            arrival,
            slept,
            spun,
            applied_delta: 0,
        };

        // SAFETY: slock held
        let meta = unsafe { &mut *self.meta.get() };
        let current = self.snapshot().sws();
        let delta = meta.oracle.eval(spun, slept, current);
        if sws != current {
            // the window moved since this thread arrived; drop the decision
            return trace;
        }
        let delta = clamp_delta(sws, delta.get(), self.max).get();
        if delta != 0 {
            let prev = LockState::from_word(
                self.lstate
                    .fetch_add(sws_increment(delta), Ordering::SeqCst),
            );
            let (sws_before, thc) = prev.unpack();
            let sws_after = (i64::from(sws_before) + delta) as u32;
            meta.wuc += wuc_adjust(delta, thc, sws_before, sws_after);
            trace.applied_delta = delta;
        }
        trace
    }

    /// Releases the lock.
    ///
    /// Must only be called by the thread that holds it.
    pub fn release(&self) {
        debug_assert!(
            self.slock.is_locked(),
            "release of a MutableLock that is not held"
        );
        // SAFETY: slock held by the caller
        let meta = unsafe { &mut *self.meta.get() };
        let decision = ReleaseDecision::take(&mut meta.wuc);
        let prev = LockState::from_word(self.lstate.fetch_sub(1, Ordering::SeqCst));
        self.slock.unlock();

        let (sws, thc_prev) = prev.unpack();
        let n = decision.wake_count(thc_prev, sws);
        if n > 0 {
            self.sleepq.wake_up(n);
        }
    }

    pub fn lock(&self) -> MutableLockGuard<'_> {
        self.acquire();
        MutableLockGuard { lock: self }
    }

    #[cfg(test)]
    fn with_state(max_sws: u32, period: u32, state: LockState) -> Self {
        let l = Self::with_params(max_sws, period).unwrap();
        l.lstate.store(state.word(), Ordering::SeqCst);
        l
    }

    #[cfg(test)]
    fn wuc(&self) -> i64 {
        unsafe { (*self.meta.get()).wuc }
    }
}

pub struct MutableLockGuard<'a> {
    lock: &'a MutableLock,
}

impl Drop for MutableLockGuard<'_> {
    fn drop(&mut self) {
        self.lock.release();
    }
}

impl RawLock for MutableLock {
    type Node = ();

    const NAME: &'static str = "mutlock";

    fn lock(&self, _: &mut ()) {
        self.acquire();
    }

    unsafe fn unlock(&self, _: &mut ()) {
        self.release();
    }
}
