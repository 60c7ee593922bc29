use std::sync::{Condvar, Mutex, MutexGuard};

#[derive(Default)]
struct Inner {
    permits: u64,
    sleepers: u64,
}

/// Counting semaphore used as the sleeping object of the blocking locks.
///
/// Permits accumulate: a `wake_up` issued before the matching `sleep` is not
/// lost, the later `sleep` returns at once. `sleep` never returns without
/// consuming a permit.
#[derive(Default)]
pub struct SleepQueue {
    inner: Mutex<Inner>,
    cond: Condvar,
}

impl SleepQueue {
    pub fn new() -> Self {
        Self::default()
    }

    fn inner(&self) -> MutexGuard<'_, Inner> {
        // the critical sections below cannot panic
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Blocks until a permit is available, then consumes it.
    pub fn sleep(&self) {
        let mut g = self.inner();
        g.sleepers += 1;
        while g.permits == 0 {
            g = self.cond.wait(g).unwrap_or_else(|e| e.into_inner());
        }
        g.permits -= 1;
        g.sleepers -= 1;
    }

    /// Grants `n` permits and returns how many were granted (always `n`).
    pub fn wake_up(&self, n: u32) -> u32 {
        if n == 0 {
            return 0;
        }
        let mut g = self.inner();
        g.permits += u64::from(n);
        let sleepers = g.sleepers;
        drop(g);
        match sleepers {
            0 => {}
            1 => self.cond.notify_one(),
            _ if n == 1 => self.cond.notify_one(),
            _ => self.cond.notify_all(),
        }
        n
    }

    /// Outstanding permits; racy, for instrumentation.
    pub fn permits(&self) -> u64 {
        self.inner().permits
    }

    /// Threads currently blocked in `sleep`; racy, for instrumentation.
    pub fn sleepers(&self) -> u64 {
        self.inner().sleepers
    }
}
