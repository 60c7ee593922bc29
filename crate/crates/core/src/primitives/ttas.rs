use std::hint::spin_loop;
use std::sync::atomic::{AtomicBool, Ordering};

use crossbeam_utils::CachePadded;

use crate::raw::RawLock;

/// Test-and-test-and-set spin lock that reports whether the caller had to wait.
#[derive(Default)]
pub struct TtasLock {
    locked: CachePadded<AtomicBool>,
}

impl TtasLock {
    pub const fn new() -> Self {
        TtasLock {
            locked: CachePadded::new(AtomicBool::new(false)),
        }
    }

    /// Acquires the lock. Returns `true` iff the lock was seen held at least
    /// once before this call got it.
    pub fn lock(&self) -> bool {
        let mut contended = false;
        loop {
            if !self.locked.load(Ordering::Relaxed) {
                if self
                    .locked
                    .compare_exchange_weak(false, true, Ordering::Acquire, Ordering::Relaxed)
                    .is_ok()
                {
                    return contended;
                }
                // lost the race (or spurious failure on a free lock); the next
                // load decides whether this counts as contention
                continue;
            }
            contended = true;
            spin_loop();
        }
    }

    pub fn try_lock(&self) -> bool {
        self.locked
            .compare_exchange(false, true, Ordering::Acquire, Ordering::Relaxed)
            .is_ok()
    }

    pub fn unlock(&self) {
        debug_assert!(self.is_locked(), "unlock of a free TtasLock");
        self.locked.store(false, Ordering::Release);
    }

    pub fn is_locked(&self) -> bool {
        self.locked.load(Ordering::Relaxed)
    }
}

impl RawLock for TtasLock {
    type Node = ();

    const NAME: &'static str = "ttas";

    fn lock(&self, _: &mut ()) {
        TtasLock::lock(self);
    }

    unsafe fn unlock(&self, _: &mut ()) {
        TtasLock::unlock(self);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::{Arc, Barrier};
    use std::thread;
    use std::time::Duration;

    #[test]
    fn uncontended_reports_false() {
        let l = TtasLock::new();
        assert!(!l.lock());
        l.unlock();
        assert!(!l.lock());
        l.unlock();
    }

    #[test]
    fn waiting_reports_true() {
        let l = Arc::new(TtasLock::new());
        assert!(!l.lock());
        let started = Arc::new(Barrier::new(2));
        let h = {
            let l = l.clone();
            let started = started.clone();
            thread::spawn(move || {
                started.wait();
                let c = l.lock();
                l.unlock();
                c
            })
        };
        started.wait();
        thread::sleep(Duration::from_millis(50));
        l.unlock();
        assert!(h.join().unwrap());
    }

    #[test]
    fn try_lock_respects_holder() {
        let l = TtasLock::new();
        assert!(l.try_lock());
        assert!(!l.try_lock());
        l.unlock();
        assert!(l.try_lock());
        l.unlock();
    }
}
