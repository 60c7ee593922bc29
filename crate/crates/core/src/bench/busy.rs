use std::hint::black_box;
use std::sync::OnceLock;
use std::time::Duration;

use super::cputime::thread_cpu_time;

static ITERS_PER_US: OnceLock<f64> = OnceLock::new();

#[inline(never)]
fn spin(iters: u64) {
    for i in 0..iters {
        black_box(i);
    }
}

fn calibrate() -> f64 {
    // grow the batch until it is long enough to time, then keep the fastest of
    // a few samples (CPU time excludes preemption, the minimum drops cache and
    // frequency warm-up noise)
    let mut iters = 1u64 << 12;
    loop {
        let t0 = thread_cpu_time();
        spin(iters);
        if thread_cpu_time() - t0 >= Duration::from_millis(2) {
            break;
        }
        iters *= 2;
    }
    let best = (0..5)
        .map(|_| {
            let t0 = thread_cpu_time();
            spin(iters);
            thread_cpu_time() - t0
        })
        .min()
        .expect("non-empty");
    iters as f64 / (best.as_secs_f64() * 1e6)
}

/// Loop iterations per microsecond on this host; measured on first use.
pub fn iterations_per_us() -> f64 {
    *ITERS_PER_US.get_or_init(calibrate)
}

/// Burns roughly `micros` microseconds of CPU on the calling thread.
pub fn busy_work(micros: f64) {
    if micros <= 0.0 {
        return;
    }
    spin((micros * iterations_per_us()).round() as u64);
}
