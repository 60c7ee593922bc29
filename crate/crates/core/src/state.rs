//! Pure bookkeeping for the mutable lock.
//!
//! Everything here is single-threaded and side-effect free (except the oracle,
//! which mutates its own counter). [`MutableLock`](crate::MutableLock) wires
//! these pieces to its atomics.

use std::fmt;

/// Bit offset of the spinning-window size inside the packed state word.
pub const SWS_SHIFT: u32 = 32;

const THC_MASK: u64 = 0xFFFF_FFFF;

/// The packed `<sws, thc>` pair.
///
/// `sws` (spinning-window size) lives in the upper 32 bits and `thc` (holder
/// plus waiters) in the lower 32 bits, so a single fetch-and-add can move one
/// field and observe both.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LockState(u64);

impl LockState {
    #[inline]
    pub const fn pack(sws: u32, thc: u32) -> Self {
        LockState(((sws as u64) << SWS_SHIFT) | thc as u64)
    }

    #[inline]
    pub const fn unpack(self) -> (u32, u32) {
        (self.sws(), self.thc())
    }

    #[inline]
    pub const fn from_word(word: u64) -> Self {
        LockState(word)
    }

    #[inline]
    pub const fn word(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn sws(self) -> u32 {
        (self.0 >> SWS_SHIFT) as u32
    }

    #[inline]
    pub const fn thc(self) -> u32 {
        (self.0 & THC_MASK) as u32
    }
}

impl fmt::Debug for LockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LockState")
            .field("sws", &self.sws())
            .field("thc", &self.thc())
            .finish()
    }
}

/// Word to add to the packed state to move `sws` by `delta` (thc untouched).
///
/// Negative deltas rely on two's-complement wrap-around of the add.
#[inline]
pub const fn sws_increment(delta: i64) -> u64 {
    (delta << SWS_SHIFT) as u64
}

/// Signed variation of the spinning-window size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SwsDelta(pub i64);

impl SwsDelta {
    pub const ZERO: SwsDelta = SwsDelta(0);

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Clamps `delta` so that `sws + delta` stays in `[1, max]`.
///
/// Deltas that already land in range pass through unchanged.
pub fn clamp_delta(sws: u32, delta: i64, max: u32) -> SwsDelta {
    debug_assert!(sws >= 1 && sws <= max, "sws {sws} outside [1, {max}]");
    let sws = i64::from(sws);
    let lo = 1 - sws;
    let hi = i64::from(max) - sws;
    SwsDelta(delta.max(lo).min(hi))
}

/// Correction to the wake-up count after `sws` moved from `sws_before` to
/// `sws_after` while `thc` threads were registered.
///
/// Growing the window while sleepers sit outside it means some of them must be
/// woken now (positive result). Shrinking it while spinners sit past the new
/// bound means that many future releases must skip their wake (negative).
pub fn wuc_adjust(delta: i64, thc: u32, sws_before: u32, sws_after: u32) -> i64 {
    debug_assert!(delta != 0);
    debug_assert_eq!(i64::from(sws_before) + delta, i64::from(sws_after));
    let thc = i64::from(thc);
    let (before, after) = (i64::from(sws_before), i64::from(sws_after));
    let sign = delta.signum();
    let base = if sign < 0 && thc > after {
        thc - after
    } else if sign > 0 && thc > before {
        thc - before
    } else {
        0
    };
    sign * delta.abs().min(base)
}

/// The spinning-window adaptation policy.
///
/// Doubles the window when a thread comes back from sleep and finds nobody
/// spinning on the inner lock, and shrinks it by one after `period` quiet
/// critical sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwsOracle {
    cnt: u32,
    period: u32,
}

impl SwsOracle {
    pub fn new(period: u32) -> Self {
        assert!(period > 0, "oracle period must be positive");
        SwsOracle { cnt: 0, period }
    }

    pub fn count(&self) -> u32 {
        self.cnt
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    /// Records one critical-section entry and returns the requested change.
    ///
    /// `sws` is the current window size; a doubling request asks for `+sws`.
    pub fn eval(&mut self, spun: bool, slept: bool, sws: u32) -> SwsDelta {
        self.cnt += 1;
        if slept && !spun {
            self.cnt = 0;
            SwsDelta(i64::from(sws))
        } else if self.cnt == self.period {
            self.cnt = 0;
            SwsDelta(-1)
        } else {
            SwsDelta::ZERO
        }
    }
}

/// Wake plan of one release: how many sleepers to wake.
///
/// `-1` means this release must not wake anybody.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReleaseDecision {
    pub r_wuc: i64,
}

impl ReleaseDecision {
    /// Consumes the shared wake-up count at the start of a release.
    ///
    /// A non-negative count is taken whole. A negative one is paid back by one
    /// and this release is marked as suppressed.
    pub fn take(wuc: &mut i64) -> Self {
        if *wuc >= 0 {
            let r_wuc = *wuc;
            *wuc = 0;
            ReleaseDecision { r_wuc }
        } else {
            *wuc += 1;
            ReleaseDecision { r_wuc: -1 }
        }
    }

    pub fn is_suppressed(self) -> bool {
        self.r_wuc < 0
    }

    /// Final number of permits to grant, given the state observed by the
    /// departing fetch-and-add (`thc_prev` still counts the releasing thread).
    pub fn wake_count(self, thc_prev: u32, sws: u32) -> u32 {
        if self.is_suppressed() {
            return 0;
        }
        let extra = i64::from(thc_prev > sws);
        u32::try_from(self.r_wuc + extra).unwrap_or(u32::MAX)
    }
}
