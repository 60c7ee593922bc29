use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::mutable::{default_max_sws, DEFAULT_PERIOD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LockKind {
    Mutlock,
    Ttas,
    Mcs,
    Sleep,
    AdaptiveSleep,
}

impl LockKind {
    pub const ALL: [LockKind; 5] = [
        LockKind::Mutlock,
        LockKind::Ttas,
        LockKind::Mcs,
        LockKind::Sleep,
        LockKind::AdaptiveSleep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LockKind::Mutlock => "mutlock",
            LockKind::Ttas => "ttas",
            LockKind::Mcs => "mcs",
            LockKind::Sleep => "sleep",
            LockKind::AdaptiveSleep => "adaptive_sleep",
        }
    }
}

impl fmt::Display for LockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LockKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LockKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| BenchError::UnknownLock(s.to_owned()))
    }
}

/// One lockbench workload.
///
/// Section lengths are in microseconds, drawn uniformly from `[csl, csu)` and
/// `[ncsl, ncsu)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub lock: LockKind,
    pub threads: usize,
    pub csl: f64,
    pub csu: f64,
    pub ncsl: f64,
    pub ncsu: f64,
    pub duration: Duration,
    pub warmup: Duration,
    pub runs: u32,
    pub seed: u64,
    pub pin: bool,
    /// Oracle period of the mutable lock.
    pub period: u32,
    /// Window ceiling of the mutable lock.
    pub max_sws: u32,
}

impl BenchConfig {
    pub fn new(lock: LockKind, threads: usize) -> Self {
        BenchConfig {
            lock,
            threads,
            csl: 0.0,
            csu: 0.0,
            ncsl: 0.0,
            ncsu: 0.0,
            duration: Duration::from_secs(1),
            warmup: Duration::from_millis(100),
            runs: 1,
            seed: 0,
            pin: false,
            period: DEFAULT_PERIOD,
            max_sws: default_max_sws(),
        }
    }

    pub fn cs(mut self, low: f64, high: f64) -> Self {
        self.csl = low;
        self.csu = high;
        self
    }

    pub fn ncs(mut self, low: f64, high: f64) -> Self {
        self.ncsl = low;
        self.ncsu = high;
        self
    }

    pub fn duration(mut self, d: Duration) -> Self {
        self.duration = d;
        self
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.threads == 0 {
            return Err(BenchError::NoThreads);
        }
        if self.duration.is_zero() {
            return Err(BenchError::ZeroDuration);
        }
        if self.runs == 0 {
            return Err(BenchError::ZeroRuns);
        }
        for (low, high) in [(self.csl, self.csu), (self.ncsl, self.ncsu)] {
            if !(low.is_finite() && high.is_finite()) || low < 0.0 || low > high {
                return Err(BenchError::BadInterval { low, high });
            }
        }
        if self.lock == LockKind::Mutlock && (self.period == 0 || self.max_sws == 0) {
            return Err(BenchError::BadMutlockParams);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in LockKind::ALL {
            assert_eq!(k.name().parse::<LockKind>().unwrap(), k);
        }
        assert!("pthread".parse::<LockKind>().is_err());
    }

    #[test]
    fn validation() {
        let ok = BenchConfig::new(LockKind::Ttas, 2)
            .cs(0.0, 3.7)
            .ncs(0.0, 3.7);
        assert!(ok.validate().is_ok());
        assert_eq!(
            BenchConfig::new(LockKind::Ttas, 0).validate(),
            Err(BenchError::NoThreads)
        );
        assert!(matches!(
            ok.clone().cs(4.0, 1.0).validate(),
            Err(BenchError::BadInterval { .. })
        ));
        assert_eq!(
            ok.clone().duration(Duration::ZERO).validate(),
            Err(BenchError::ZeroDuration)
        );
        let mut m = BenchConfig::new(LockKind::Mutlock, 2);
        m.period = 0;
        assert_eq!(m.validate(), Err(BenchError::BadMutlockParams));
    }
}
