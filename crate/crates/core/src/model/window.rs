use std::fmt;

use super::SimError;

/// State of a thread occupying a wait-array slot past index 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Spinning,
    /// Woken, not yet runnable.
    Waking,
    Sleeping,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Occupant {
    pub thread: usize,
    pub role: Role,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Arrival(usize),
    Release,
}

/// The logical array of threads registered on a windowed lock.
///
/// Index 0 is the holder (empty while the lock is free), indices `1..=sws`
/// form the spinning window and everything past it sleeps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WaitArray {
    holder: Option<usize>,
    // waiters[k] sits at index k + 1
    waiters: Vec<Occupant>,
}

impl WaitArray {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn holder(&self) -> Option<usize> {
        self.holder
    }

    pub fn waiters(&self) -> &[Occupant] {
        &self.waiters
    }

    /// Occupied slots: holder plus waiters.
    pub fn thc(&self) -> usize {
        usize::from(self.holder.is_some()) + self.waiters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thc() == 0
    }

    /// Index of `thread`, if registered.
    pub fn index_of(&self, thread: usize) -> Option<usize> {
        if self.holder == Some(thread) {
            return Some(0);
        }
        self.waiters
            .iter()
            .position(|o| o.thread == thread)
            .map(|k| k + 1)
    }

    pub fn count(&self, role: Role) -> usize {
        self.waiters.iter().filter(|o| o.role == role).count()
    }

    /// Applies an arrival or a release.
    pub fn transition(&self, event: Event, sws: usize) -> Result<WaitArray, SimError> {
        let mut next = self.clone();
        match event {
            Event::Arrival(thread) => next.arrive(thread, sws)?,
            Event::Release => next.release(sws)?,
        }
        Ok(next)
    }

    fn arrive(&mut self, thread: usize, sws: usize) -> Result<(), SimError> {
        if self.index_of(thread).is_some() {
            return Err(SimError::AlreadyRegistered(thread));
        }
        if self.holder.is_none() {
            self.holder = Some(thread);
            return Ok(());
        }
        let index = self.waiters.len() + 1;
        let role = if index <= sws {
            Role::Spinning
        } else {
            Role::Sleeping
        };
        self.waiters.push(Occupant { thread, role });
        Ok(())
    }

    fn release(&mut self, sws: usize) -> Result<(), SimError> {
        if self.holder.take().is_none() {
            return Err(SimError::ReleaseWithoutHolder);
        }
        match self.waiters.iter().position(|o| o.role == Role::Spinning) {
            Some(k) => {
                self.holder = Some(self.waiters[k].thread);
                let sleeper = if k < sws {
                    self.waiters.iter().position(|o| o.role == Role::Sleeping)
                } else {
                    None
                };
                match sleeper {
                    Some(s) => {
                        // the woken sleeper takes the freed window slot; the
                        // threads behind it shift down by one
                        self.waiters[k] = Occupant {
                            thread: self.waiters[s].thread,
                            role: Role::Waking,
                        };
                        self.waiters.remove(s);
                    }
                    None => {
                        self.waiters.remove(k);
                    }
                }
            }
            None => {
                // nobody can take over; unless someone is already on the way,
                // wake the first sleeper to grab the free lock
                if self.count(Role::Waking) == 0 {
                    if let Some(o) = self.waiters.iter_mut().find(|o| o.role == Role::Sleeping) {
                        o.role = Role::Waking;
                    }
                }
            }
        }
        Ok(())
    }

    /// A waking thread became runnable: it takes the lock if free, otherwise
    /// it spins.
    pub fn finish_wake(&mut self, thread: usize, sws: usize) -> Result<(), SimError> {
        let k = self
            .waiters
            .iter()
            .position(|o| o.thread == thread && o.role == Role::Waking)
            .ok_or(SimError::NotWaking(thread))?;
        if self.holder.is_none() {
            self.holder = Some(thread);
            self.waiters.remove(k);
            // compaction may pull sleepers into the window; they get woken
            for o in self.waiters.iter_mut().take(sws) {
                if o.role == Role::Sleeping {
                    o.role = Role::Waking;
                }
            }
        } else {
            self.waiters[k].role = Role::Spinning;
        }
        Ok(())
    }
}

impl fmt::Display for WaitArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.holder {
            Some(t) => write!(f, "[H:T{t}")?,
            None => write!(f, "[-")?,
        }
        for o in &self.waiters {
            let tag = match o.role {
                Role::Spinning => 'S',
                Role::Waking => 'W',
                Role::Sleeping => 'Z',
            };
            write!(f, " {tag}:T{}", o.thread)?;
        }
        write!(f, "]")
    }
}

/// Applies `event` to `array` with window size `sws`.
pub fn window_transition(
    array: &WaitArray,
    event: Event,
    sws: usize,
) -> Result<WaitArray, SimError> {
    array.transition(event, sws)
}
