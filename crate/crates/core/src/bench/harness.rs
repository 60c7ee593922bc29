use std::io;
use std::sync::atomic::{AtomicU64, AtomicU8, AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::busy::{busy_work, iterations_per_us};
use super::config::{BenchConfig, LockKind};
use super::cputime::{pin_to_core, thread_cpu_time};
use super::sampler::{thread_seed, WorkloadSampler};
use super::BenchError;
use crate::mutable::MutableLock;
use crate::primitives::{AdaptiveSleepLock, McsLock, SleepLock, TtasLock};
use crate::raw::RawLock;

const WARMUP: u8 = 0;
const MEASURE: u8 = 1;
const STOP: u8 = 2;

/// Counters of one worker over the measured interval.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ThreadStats {
    pub cs_count: u64,
    /// CPU time inside acquire and release.
    pub sync_cpu: Duration,
    /// All CPU time of the worker while measuring.
    pub total_cpu: Duration,
    /// First section lengths drawn, `(cs, ncs)`, for reproducibility checks.
    pub first_draws: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub lock: LockKind,
    pub threads: usize,
    pub seed: u64,
    pub cs_count: u64,
    /// Critical sections per second of wall time.
    pub throughput: f64,
    /// Seconds of CPU spent in acquire and release, all threads.
    pub sync_cpu: f64,
    pub wall: f64,
    /// Times the occupancy counter saw two threads inside a critical section.
    pub violations: u64,
    /// From the stop signal until every worker was joined.
    pub join_time: Duration,
    pub per_thread: Vec<ThreadStats>,
}

impl BenchResult {
    pub fn total_cpu(&self) -> f64 {
        self.per_thread
            .iter()
            .map(|t| t.total_cpu.as_secs_f64())
            .sum()
    }

    pub fn min_thread_cs(&self) -> u64 {
        self.per_thread
            .iter()
            .map(|t| t.cs_count)
            .min()
            .unwrap_or(0)
    }
}

/// One CSV row of `bench` output; field order is the column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub lock: String,
    pub threads: usize,
    pub csl_us: f64,
    pub csu_us: f64,
    pub ncsl_us: f64,
    pub ncsu_us: f64,
    pub run: u32,
    pub seed: u64,
    pub wall_s: f64,
    pub cs_count: u64,
    pub throughput_cs_per_s: f64,
    pub sync_cpu_s: f64,
}

impl BenchRecord {
    pub fn new(config: &BenchConfig, run: u32, result: &BenchResult) -> Self {
        BenchRecord {
            lock: config.lock.name().to_owned(),
            threads: config.threads,
            csl_us: config.csl,
            csu_us: config.csu,
            ncsl_us: config.ncsl,
            ncsu_us: config.ncsu,
            run,
            seed: result.seed,
            wall_s: result.wall,
            cs_count: result.cs_count,
            throughput_cs_per_s: result.throughput,
            sync_cpu_s: result.sync_cpu,
        }
    }
}

/// Start line: workers block until the driver opens it.
#[derive(Default)]
struct Gate {
    open: Mutex<bool>,
    cond: Condvar,
}

impl Gate {
    fn wait(&self) {
        let mut open = self.open.lock().unwrap_or_else(|e| e.into_inner());
        while !*open {
            open = self.cond.wait(open).unwrap_or_else(|e| e.into_inner());
        }
    }

    fn open(&self) {
        *self.open.lock().unwrap_or_else(|e| e.into_inner()) = true;
        self.cond.notify_all();
    }
}

struct Shared {
    phase: AtomicU8,
    occupancy: AtomicUsize,
    violations: AtomicU64,
}

/// Number of leading draws kept in [`ThreadStats::first_draws`].
const KEPT_DRAWS: usize = 16;

fn worker<L: RawLock>(
    lock: &L,
    shared: &Shared,
    gate: &Gate,
    mut cs_len: WorkloadSampler,
    mut ncs_len: WorkloadSampler,
) -> ThreadStats {
    let mut node = L::Node::default();
    let mut stats = ThreadStats::default();
    let mut measure_start: Option<Duration> = None;
    gate.wait();
    loop {
        let phase = shared.phase.load(Ordering::Relaxed);
        if phase == STOP {
            break;
        }
        if phase == MEASURE && measure_start.is_none() {
            measure_start = Some(thread_cpu_time());
        }
        let cs = cs_len.next().expect("infinite stream");
        let ncs = ncs_len.next().expect("infinite stream");
        if stats.first_draws.len() < KEPT_DRAWS {
            stats.first_draws.push((cs, ncs));
        }

        let t0 = thread_cpu_time();
        lock.lock(&mut node);
        let t1 = thread_cpu_time();
        if shared.occupancy.fetch_add(1, Ordering::AcqRel) != 0 {
            shared.violations.fetch_add(1, Ordering::Relaxed);
        }
        let counted = shared.phase.load(Ordering::Relaxed) == MEASURE;
        if counted {
            stats.cs_count += 1;
        }
        busy_work(cs);
        shared.occupancy.fetch_sub(1, Ordering::AcqRel);
        let t2 = thread_cpu_time();
        // SAFETY: locked above with `node`
        unsafe { lock.unlock(&mut node) };
        let t3 = thread_cpu_time();
        if counted {
            stats.sync_cpu += (t1 - t0) + (t3 - t2);
        }
        busy_work(ncs);
    }
    if let Some(start) = measure_start {
        stats.total_cpu = thread_cpu_time() - start;
    }
    stats
}

fn drive<L: RawLock>(lock: L, config: &BenchConfig, seed: u64) -> Result<BenchResult, BenchError> {
    // calibrate before any worker starts so nobody measures the calibration
    iterations_per_us();
    let shared = Shared {
        phase: AtomicU8::new(WARMUP),
        occupancy: AtomicUsize::new(0),
        violations: AtomicU64::new(0),
    };
    let gate = Gate::default();
    let mut samplers = Vec::with_capacity(config.threads);
    for i in 0..config.threads {
        samplers.push((
            WorkloadSampler::new(thread_seed(seed, i, 0), config.csl, config.csu)?,
            WorkloadSampler::new(thread_seed(seed, i, 1), config.ncsl, config.ncsu)?,
        ));
    }

    thread::scope(|scope| {
        let mut handles = Vec::with_capacity(config.threads);
        for (i, (cs, ncs)) in samplers.into_iter().enumerate() {
            let (lock, shared, gate) = (&lock, &shared, &gate);
            let pin = config.pin;
            let spawned = thread::Builder::new()
                .name(format!("lockbench-{i}"))
                .spawn_scoped(scope, move || {
                    if pin {
                        // best effort; an unpinned worker still measures
                        let _ = pin_to_core(i);
                    }
                    worker(lock, shared, gate, cs, ncs)
                });
            match spawned {
                Ok(h) => handles.push(h),
                Err(e) => {
                    // let the workers already spawned exit straight away
                    shared.phase.store(STOP, Ordering::SeqCst);
                    gate.open();
                    return Err(BenchError::Spawn {
                        index: i,
                        reason: e.to_string(),
                    });
                }
            }
        }
        gate.open();
        thread::sleep(config.warmup);
        shared.phase.store(MEASURE, Ordering::SeqCst);
        let start = Instant::now();
        thread::sleep(config.duration);
        shared.phase.store(STOP, Ordering::SeqCst);
        let wall = start.elapsed();
        let per_thread: Vec<ThreadStats> = handles
            .into_iter()
            .map(|h| h.join().expect("benchmark worker panicked"))
            .collect();
        let join_time = start.elapsed() - wall;

        let cs_count = per_thread.iter().map(|t| t.cs_count).sum();
        let wall = wall.as_secs_f64();
        Ok(BenchResult {
            lock: config.lock,
            threads: config.threads,
            seed,
            cs_count,
            throughput: cs_count as f64 / wall,
            sync_cpu: per_thread.iter().map(|t| t.sync_cpu.as_secs_f64()).sum(),
            wall,
            violations: shared.violations.load(Ordering::SeqCst),
            join_time,
            per_thread,
        })
    })
}

/// Runs one measurement of `config` with workload seed `seed`.
pub fn run_once(config: &BenchConfig, seed: u64) -> Result<BenchResult, BenchError> {
    config.validate()?;
    match config.lock {
        LockKind::Mutlock => drive(
            MutableLock::with_params(config.max_sws, config.period)
                .map_err(|_| BenchError::BadMutlockParams)?,
            config,
            seed,
        ),
        LockKind::Ttas => drive(TtasLock::new(), config, seed),
        LockKind::Mcs => drive(McsLock::new(), config, seed),
        LockKind::Sleep => drive(SleepLock::new(), config, seed),
        LockKind::AdaptiveSleep => drive(AdaptiveSleepLock::new(), config, seed),
    }
}

/// Runs one measurement with `config.seed`.
pub fn run_bench(config: &BenchConfig) -> Result<BenchResult, BenchError> {
    run_once(config, config.seed)
}

/// Runs `config.runs` measurements; run `r` uses seed `config.seed + r`.
pub fn run_series(config: &BenchConfig) -> Result<Vec<(BenchRecord, BenchResult)>, BenchError> {
    config.validate()?;
    (0..config.runs)
        .map(|run| {
            let result = run_once(config, config.seed.wrapping_add(u64::from(run)))?;
            Ok((BenchRecord::new(config, run, &result), result))
        })
        .collect()
}

/// Writes records as CSV with a header row.
pub fn write_csv<W: io::Write>(out: W, records: &[BenchRecord]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
