use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::window::{Event, Role, WaitArray};
use super::SimError;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Every waiter spins.
    SpinOnly,
    /// Every waiter sleeps; each release wakes one.
    SleepOnly,
    /// Up to `sws` waiters spin, the rest sleep.
    Hybrid,
}

impl FromStr for Policy {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spin" | "spin_only" => Ok(Policy::SpinOnly),
            "sleep" | "sleep_only" => Ok(Policy::SleepOnly),
            "hybrid" => Ok(Policy::Hybrid),
            other => Err(SimError::UnknownPolicy(other.to_owned())),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::SpinOnly => "spin",
            Policy::SleepOnly => "sleep",
            Policy::Hybrid => "hybrid",
        })
    }
}

/// A contention scenario: `threads` threads arrive together at slot 0 and each
/// runs one critical section.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub threads: usize,
    pub policy: Policy,
    /// Window size; only read by [`Policy::Hybrid`].
    pub sws: usize,
    pub cs_slots: u32,
    pub wake_slots: u32,
}

impl SimConfig {
    pub fn new(threads: usize, policy: Policy) -> Self {
        SimConfig {
            threads,
            policy,
            sws: 1,
            cs_slots: 1,
            wake_slots: 1,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.threads == 0 {
            return Err(SimError::NoThreads);
        }
        if self.cs_slots == 0 {
            return Err(SimError::EmptyCriticalSection);
        }
        if self.policy == Policy::Hybrid && self.sws == 0 {
            return Err(SimError::EmptyWindow);
        }
        Ok(())
    }

    fn window(&self) -> usize {
        match self.policy {
            Policy::SpinOnly => self.threads,
            Policy::SleepOnly => 0,
            Policy::Hybrid => self.sws,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Activity {
    Cs,
    Spin,
    Wake,
    Idle,
}

impl Activity {
    fn symbol(self) -> char {
        match self {
            Activity::Cs => 'X',
            Activity::Spin => 's',
            Activity::Wake => 'w',
            Activity::Idle => '.',
        }
    }

    fn name(self) -> &'static str {
        match self {
            Activity::Cs => "cs",
            Activity::Spin => "spin",
            Activity::Wake => "wake",
            Activity::Idle => "idle",
        }
    }
}

/// Slot-by-slot outcome of a [`simulate`] run.
///
/// Every thread-slot that is neither a critical section nor idle counts as
/// waste, whatever the ratio of critical-section to wake-up length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimTrace {
    /// `slots[s][t]` is thread `t`'s activity during slot `s + 1`.
    pub slots: Vec<Vec<Activity>>,
    pub completion_slot: usize,
    pub cs_count: usize,
    pub cs_slots: usize,
    pub wasted_spin_slots: usize,
    pub wasted_wake_slots: usize,
}

impl SimTrace {
    pub fn wasted_slots(&self) -> usize {
        self.wasted_spin_slots + self.wasted_wake_slots
    }

    /// Critical sections per slot.
    pub fn throughput<T: Scalar>(&self) -> T {
        T::ratio(self.cs_count as u64, self.completion_slot as u64)
    }

    /// Share of busy thread-slots spent on waste rather than critical sections.
    pub fn waste_fraction<T: Scalar>(&self) -> T {
        let wasted = self.wasted_slots() as u64;
        T::ratio(wasted, wasted + self.cs_slots as u64)
    }

    pub fn spinners_in_slot(&self, slot: usize) -> usize {
        self.slots[slot]
            .iter()
            .filter(|&&a| a == Activity::Spin)
            .count()
    }

    /// One row per thread, one column per slot.
    pub fn render_text(&self) -> String {
        let threads = self.slots.first().map_or(0, Vec::len);
        let mut out = String::new();
        let _ = write!(out, "{:>6} ", "slot");
        for s in 1..=self.slots.len() {
            let _ = write!(out, "{:>3}", s);
        }
        out.push('\n');
        for t in 0..threads {
            let _ = write!(out, "{:>6} ", format!("T{}", t + 1));
            for row in &self.slots {
                let _ = write!(out, "{:>3}", row[t].symbol());
            }
            out.push('\n');
        }
        out
    }

    /// `slot,thread,activity` rows with a header line.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("slot,thread,activity\n");
        for (s, row) in self.slots.iter().enumerate() {
            for (t, a) in row.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", s + 1, t + 1, a.name());
            }
        }
        out
    }
}

/// Runs the scenario to completion.
///
/// Random choices of the abstract model (which spinner gets the lock, which
/// sleeper wakes) are resolved to the lowest index. A thread that finishes
/// waking in the same slot the holder finishes counts as a spinner at that
/// release.
pub fn simulate(config: &SimConfig) -> Result<SimTrace, SimError> {
    config.validate()?;
    let n = config.threads;
    let sws = config.window();
    let cs_len = config.cs_slots;

    let mut array = WaitArray::new();
    for t in 0..n {
        array = array.transition(Event::Arrival(t), sws)?;
    }
    let mut cs_left = vec![0u32; n];
    let mut wake_left = vec![0u32; n];
    let mut done = vec![false; n];
    if let Some(h) = array.holder() {
        cs_left[h] = cs_len;
    }

    let mut trace = SimTrace {
        slots: Vec::new(),
        completion_slot: 0,
        cs_count: 0,
        cs_slots: 0,
        wasted_spin_slots: 0,
        wasted_wake_slots: 0,
    };
    settle(&mut array, &mut wake_left, &mut cs_left, config, sws)?;

    let limit = n * (cs_len as usize + config.wake_slots as usize + 1) + 1;
    while done.iter().any(|d| !d) {
        if trace.slots.len() >= limit {
            return Err(SimError::Stalled(trace.slots.len()));
        }
        let mut row = vec![Activity::Idle; n];
        if let Some(h) = array.holder() {
            row[h] = Activity::Cs;
            cs_left[h] -= 1;
            trace.cs_slots += 1;
        }
        for o in array.waiters() {
            match o.role {
                Role::Spinning => {
                    row[o.thread] = Activity::Spin;
                    trace.wasted_spin_slots += 1;
                }
                Role::Waking => {
                    row[o.thread] = Activity::Wake;
                    wake_left[o.thread] -= 1;
                    trace.wasted_wake_slots += 1;
                }
                Role::Sleeping => {}
            }
        }
        trace.slots.push(row);
        let slot = trace.slots.len();

        // wake-ups completing now, before the holder's release
        finish_wakes(&mut array, &wake_left, &mut cs_left, cs_len, sws)?;
        arm_wakes(&mut array, &mut wake_left, &mut cs_left, config, sws)?;

        if let Some(h) = array.holder() {
            if cs_left[h] == 0 {
                done[h] = true;
                trace.cs_count += 1;
                trace.completion_slot = slot;
                array = array.transition(Event::Release, sws)?;
                settle(&mut array, &mut wake_left, &mut cs_left, config, sws)?;
            }
        }
    }
    Ok(trace)
}

/// Arms counters for new holders and new wakers; zero-length wake-ups
/// complete immediately.
fn settle(
    array: &mut WaitArray,
    wake_left: &mut [u32],
    cs_left: &mut [u32],
    config: &SimConfig,
    sws: usize,
) -> Result<(), SimError> {
    if let Some(h) = array.holder() {
        if cs_left[h] == 0 {
            cs_left[h] = config.cs_slots;
        }
    }
    arm_wakes(array, wake_left, cs_left, config, sws)
}

/// Starts the countdown of every waker that has none yet.
fn arm_wakes(
    array: &mut WaitArray,
    wake_left: &mut [u32],
    cs_left: &mut [u32],
    config: &SimConfig,
    sws: usize,
) -> Result<(), SimError> {
    loop {
        let mut armed_instant = false;
        for o in array.waiters() {
            if o.role == Role::Waking && wake_left[o.thread] == 0 {
                if config.wake_slots == 0 {
                    armed_instant = true;
                } else {
                    wake_left[o.thread] = config.wake_slots;
                }
            }
        }
        if !armed_instant {
            return Ok(());
        }
        finish_wakes(array, wake_left, cs_left, config.cs_slots, sws)?;
    }
}

fn finish_wakes(
    array: &mut WaitArray,
    wake_left: &[u32],
    cs_left: &mut [u32],
    cs_len: u32,
    sws: usize,
) -> Result<(), SimError> {
    let ready: Vec<usize> = array
        .waiters()
        .iter()
        .filter(|o| o.role == Role::Waking && wake_left[o.thread] == 0)
        .map(|o| o.thread)
        .collect();
    for t in ready {
        array.finish_wake(t, sws)?;
        if array.holder() == Some(t) {
            cs_left[t] = cs_len;
        }
    }
    Ok(())
}
