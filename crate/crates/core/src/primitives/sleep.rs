use std::hint::spin_loop;
use std::sync::atomic::{AtomicU32, Ordering};

use crossbeam_utils::CachePadded;

use super::SleepQueue;
use crate::raw::RawLock;

const UNLOCKED: u32 = 0;
const LOCKED: u32 = 1;
// locked, and somebody may be asleep
const CONTENDED: u32 = 2;

/// Spin budget of [`AdaptiveSleepLock::new`], in polls of the lock word.
pub const DEFAULT_SPIN_BUDGET: u32 = 100;

/// Blocking lock in the style of a default pthread mutex: a single failed
/// test-and-set sends the caller to sleep.
#[derive(Default)]
pub struct SleepLock {
    state: CachePadded<AtomicU32>,
    sleepq: SleepQueue,
}

impl SleepLock {
    pub fn new() -> Self {
        Self::default()
    }

    /// Acquires the lock; returns whether the caller went to sleep.
    pub fn acquire(&self) -> bool {
        if self
            .state
            .compare_exchange(UNLOCKED, LOCKED, Ordering::Acquire, Ordering::Relaxed)
            .is_ok()
        {
            return false;
        }
        self.acquire_slow();
        true
    }

    fn acquire_slow(&self) {
        // permits may be stale (granted to a thread that already got in);
        // the loop re-checks the word after every wake-up
        while self.state.swap(CONTENDED, Ordering::Acquire) != UNLOCKED {
            self.sleepq.sleep();
        }
    }

    pub fn release(&self) {
        let prev = self.state.swap(UNLOCKED, Ordering::Release);
        debug_assert_ne!(prev, UNLOCKED, "release of a free SleepLock");
        if prev == CONTENDED {
            self.sleepq.wake_up(1);
        }
    }

    pub fn is_locked(&self) -> bool {
        self.state.load(Ordering::Relaxed) != UNLOCKED
    }
}

impl RawLock for SleepLock {
    type Node = ();

    const NAME: &'static str = "sleep";

    fn lock(&self, _: &mut ()) {
        self.acquire();
    }

    unsafe fn unlock(&self, _: &mut ()) {
        self.release();
    }
}

/// Sleep lock that polls the lock word up to `spin_budget` times before going
/// to sleep. A budget of zero is the plain [`SleepLock`].
pub struct AdaptiveSleepLock {
    inner: SleepLock,
    spin_budget: u32,
}

impl Default for AdaptiveSleepLock {
    fn default() -> Self {
        Self::new()
    }
}

impl AdaptiveSleepLock {
    pub fn new() -> Self {
        Self::with_spin_budget(DEFAULT_SPIN_BUDGET)
    }

    pub fn with_spin_budget(spin_budget: u32) -> Self {
        AdaptiveSleepLock {
            inner: SleepLock::new(),
            spin_budget,
        }
    }

    pub fn spin_budget(&self) -> u32 {
        self.spin_budget
    }

    /// Acquires the lock; returns whether the caller went to sleep.
    pub fn acquire(&self) -> bool {
        let state = &self.inner.state;
        for _ in 0..self.spin_budget {
            let s = state.load(Ordering::Relaxed);
            if s == UNLOCKED
                && state
                    .compare_exchange_weak(UNLOCKED, LOCKED, Ordering::Acquire, Ordering::Relaxed)
                    .is_ok()
            {
                return false;
            }
            spin_loop();
        }
        self.inner.acquire()
    }

    pub fn release(&self) {
        self.inner.release();
    }

    pub fn is_locked(&self) -> bool {
        self.inner.is_locked()
    }
}

impl RawLock for AdaptiveSleepLock {
    type Node = ();

    const NAME: &'static str = "adaptive_sleep";

    fn lock(&self, _: &mut ()) {
        self.acquire();
    }

    unsafe fn unlock(&self, _: &mut ()) {
        self.release();
    }
}
