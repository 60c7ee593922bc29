/// A lock without protected data.
///
/// `Node` is per-thread context the lock may need while held (queue locks keep
/// their queue entry there). Every caller uses its own node and passes the same
/// node to the matching `unlock`.
pub trait RawLock: Send + Sync {
    type Node: Default + Send;

    const NAME: &'static str;

    fn lock(&self, node: &mut Self::Node);

    /// # Safety
    ///
    /// The caller must hold the lock, acquired with this same `node`.
    unsafe fn unlock(&self, node: &mut Self::Node);

    /// Runs `f` while holding the lock.
    fn with<R>(&self, node: &mut Self::Node, f: impl FnOnce() -> R) -> R {
        self.lock(node);
        let r = f();
        // SAFETY: locked just above with the same node
        unsafe { self.unlock(node) };
        r
    }
}
