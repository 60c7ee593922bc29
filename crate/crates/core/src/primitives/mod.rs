//! Building blocks of the mutable lock and the baseline locks it is compared
//! against.

mod mcs;
mod sleep;
mod sleepq;
mod ttas;

pub use mcs::{McsGuard, McsLock, McsNode};
pub use sleep::{AdaptiveSleepLock, SleepLock, DEFAULT_SPIN_BUDGET};
pub use sleepq::SleepQueue;
pub use ttas::TtasLock;
