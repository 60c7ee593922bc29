use std::hint::spin_loop;
use std::ptr;
use std::sync::atomic::{AtomicBool, AtomicPtr, Ordering};

use crossbeam_utils::CachePadded;

use crate::raw::RawLock;

struct QNode {
    locked: AtomicBool,
    next: AtomicPtr<CachePadded<QNode>>,
}

/// Caller-owned queue entry of an [`McsLock`].
///
/// The entry lives on the heap so moving an `McsNode` around never moves the
/// memory other waiters point at. Dropping a node that is still enqueued leaks
/// its entry instead of freeing it under the queue.
pub struct McsNode {
    q: *mut CachePadded<QNode>,
    enqueued: bool,
}

// SAFETY: the raw entry is only shared through the lock protocol
unsafe impl Send for McsNode {}

impl Default for McsNode {
    fn default() -> Self {
        Self::new()
    }
}

impl McsNode {
    pub fn new() -> Self {
        let q = Box::new(CachePadded::new(QNode {
            locked: AtomicBool::new(false),
            next: AtomicPtr::new(ptr::null_mut()),
        }));
        McsNode {
            q: Box::into_raw(q),
            enqueued: false,
        }
    }
}

impl Drop for McsNode {
    fn drop(&mut self) {
        if !self.enqueued {
            // SAFETY: allocated in `new`, not referenced by any queue
            drop(unsafe { Box::from_raw(self.q) });
        }
    }
}

/// Mellor-Crummey and Scott queue lock: FIFO handoff, each waiter spins on its
/// own node.
pub struct McsLock {
    tail: CachePadded<AtomicPtr<CachePadded<QNode>>>,
}

impl Default for McsLock {
    fn default() -> Self {
        Self::new()
    }
}

pub struct McsGuard<'a> {
    lock: &'a McsLock,
    node: &'a mut McsNode,
}

impl Drop for McsGuard<'_> {
    fn drop(&mut self) {
        // SAFETY: the guard exists only while `node` holds the lock
        unsafe { self.lock.unlock_node(self.node) }
    }
}

impl McsLock {
    pub const fn new() -> Self {
        McsLock {
            tail: CachePadded::new(AtomicPtr::new(ptr::null_mut())),
        }
    }

    pub fn lock<'a>(&'a self, node: &'a mut McsNode) -> McsGuard<'a> {
        self.lock_node(node);
        McsGuard { lock: self, node }
    }

    fn lock_node(&self, node: &mut McsNode) {
        assert!(!node.enqueued, "McsNode reused while enqueued");
        let me = node.q;
        // SAFETY: `me` is owned by `node` and not in any queue yet
        let mine = unsafe { &*me };
        mine.locked.store(true, Ordering::Relaxed);
        mine.next.store(ptr::null_mut(), Ordering::Relaxed);
        node.enqueued = true;
        let prev = self.tail.swap(me, Ordering::AcqRel);
        if prev.is_null() {
            return;
        }
        // SAFETY: `prev` stays alive until its owner hands the lock to us
        unsafe { &*prev }.next.store(me, Ordering::Release);
        while mine.locked.load(Ordering::Acquire) {
            spin_loop();
        }
    }

    /// # Safety
    ///
    /// `node` must hold the lock.
    unsafe fn unlock_node(&self, node: &mut McsNode) {
        debug_assert!(
            node.enqueued,
            "unlock with a node that does not hold the lock"
        );
        let me = node.q;
        let mine = &*me;
        let mut next = mine.next.load(Ordering::Acquire);
        if next.is_null() {
            if self
                .tail
                .compare_exchange(me, ptr::null_mut(), Ordering::Release, Ordering::Relaxed)
                .is_ok()
            {
                node.enqueued = false;
                return;
            }
            // a successor swapped the tail but has not linked itself yet
            loop {
                next = mine.next.load(Ordering::Acquire);
                if !next.is_null() {
                    break;
                }
                spin_loop();
            }
        }
        (&*next).locked.store(false, Ordering::Release);
        node.enqueued = false;
    }

    pub fn is_locked(&self) -> bool {
        !self.tail.load(Ordering::Relaxed).is_null()
    }
}

impl RawLock for McsLock {
    type Node = McsNode;

    const NAME: &'static str = "mcs";

    fn lock(&self, node: &mut McsNode) {
        self.lock_node(node);
    }

    unsafe fn unlock(&self, node: &mut McsNode) {
        self.unlock_node(node);
    }
}
