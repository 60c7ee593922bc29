//! Slot model of windowed waiting.
//!
//! Time advances in slots; a critical section and a wake-up each take a whole
//! number of slots. The model counts how many thread-slots each waiting policy
//! burns on spinning and on waking, and when the last critical section ends.

mod remedy;
mod sim;
mod window;

use thiserror::Error;

pub use remedy::check_c1_c2;
pub use sim::{simulate, Activity, Policy, SimConfig, SimTrace};
pub use window::{window_transition, Event, Occupant, Role, WaitArray};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("simulation needs at least one thread")]
    NoThreads,
    #[error("critical section must last at least one slot")]
    EmptyCriticalSection,
    #[error("hybrid policy needs a window of at least one slot")]
    EmptyWindow,
    #[error("unknown policy `{0}` (expected spin, sleep or hybrid)")]
    UnknownPolicy(String),
    #[error("release on a lock nobody holds")]
    ReleaseWithoutHolder,
    #[error("thread {0} is already registered")]
    AlreadyRegistered(usize),
    #[error("thread {0} is not waking")]
    NotWaking(usize),
    #[error("no progress after {0} slots")]
    Stalled(usize),
}
