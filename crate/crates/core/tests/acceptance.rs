//! Exit criteria. Runs as a plain binary (`harness = false`) so the timed
//! stress runs have the machine to themselves, and prints one PASS/FAIL line
//! per criterion.
//!
//! The hardware comparison (criterion 7) depends on the host. Its failure is
//! reported but does not fail the suite unless `MUTLOCK_STRICT_HW=1` is set.
//! `MUTLOCK_CRITERIA=2,7` runs only the listed criteria.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mutlock::bench::{run_once, BenchConfig, BenchRecord, BenchResult, LockKind};
use mutlock::model::{check_c1_c2, simulate, Policy, SimConfig};
use mutlock::report::{aggregate, pt_exp, ratio_to_optimum};
use mutlock::{clamp_delta, default_max_sws, wuc_adjust, Exact, LockState, SwsOracle};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cores() -> usize {
    default_max_sws() as usize
}

// 1. slot model golden timelines
fn simulator_golden() -> Outcome {
    let start = Instant::now();
    let run = |policy, sws| {
        let mut c = SimConfig::new(3, policy);
        c.sws = sws;
        simulate(&c).expect("valid config")
    };
    let spin = run(Policy::SpinOnly, 1);
    let sleep = run(Policy::SleepOnly, 1);
    let hybrid = run(Policy::Hybrid, 1);
    let elapsed = start.elapsed();

    let slowdown =
        Exact::from_integer(1) - sleep.throughput::<Exact>() / spin.throughput::<Exact>();
    let checks = [
        spin.completion_slot == 3,
        spin.wasted_spin_slots == 3 && spin.wasted_wake_slots == 0,
        spin.waste_fraction::<Exact>() == Exact::new(1, 2),
        sleep.completion_slot == 5,
        sleep.wasted_wake_slots == 2 && sleep.wasted_spin_slots == 0,
        slowdown == Exact::new(2, 5),
        hybrid.completion_slot == 3,
        hybrid.wasted_slots() == 2,
        elapsed < Duration::from_secs(1),
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "spin: done@{} waste={} ({}); sleep: done@{} wake={} slowdown={}; hybrid: done@{} waste={}; {:?}",
            spin.completion_slot,
            spin.wasted_spin_slots,
            spin.waste_fraction::<Exact>(),
            sleep.completion_slot,
            sleep.wasted_wake_slots,
            slowdown,
            hybrid.completion_slot,
            hybrid.wasted_slots(),
            elapsed
        ),
    )
}

// 2. wuc_adjust against the C1/C2 remedies
fn bookkeeping_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut cases, mut mismatches) = (0u32, 0u32);
    for sws_before in 1u32..=8 {
        for delta in -8i64..=8 {
            let after = i64::from(sws_before) + delta;
            if !(1..=8).contains(&after) {
                continue;
            }
            for thc in 0u32..=16 {
                cases += 1;
                let expected = check_c1_c2(thc, sws_before, delta);
                let got = if delta == 0 {
                    0
                } else {
                    wuc_adjust(delta, thc, sws_before, after as u32)
                };
                mismatches += u32::from(got != expected);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(1),
        format!("{cases} cases, {mismatches} mismatches, {elapsed:?}"),
    )
}

fn stress(lock: LockKind, threads: usize, max_sws: u32, secs: u64) -> BenchResult {
    let mut c = BenchConfig::new(lock, threads).duration(Duration::from_secs(secs));
    c.max_sws = max_sws;
    c.seed = 0x5eed;
    run_once(&c, c.seed).expect("stress run")
}

// 3 and 4. mutual exclusion and progress under zero-length sections
fn stress_criteria() -> (Outcome, Outcome) {
    const SECS: u64 = 10;
    let n = cores();
    let counts: BTreeSet<usize> = [2, n, 2 * n].into_iter().collect();
    let mut violations = 0u64;
    let mut mx_notes = Vec::new();
    let mut progress_ok = true;
    let mut progress_notes = Vec::new();

    let mut check_progress = |r: &BenchResult, label: String| {
        let per_sec = r.min_thread_cs() as f64 / r.wall;
        let joined = r.join_time <= Duration::from_secs(5);
        progress_ok &= per_sec >= 1.0 && joined;
        progress_notes.push(format!(
            "{label}: min {per_sec:.0} cs/s/thread, join {:?}",
            r.join_time
        ));
    };

    for &threads in &counts {
        for lock in LockKind::ALL {
            let r = stress(lock, threads, n as u32, SECS);
            violations += r.violations;
            mx_notes.push(format!("{lock}x{threads}:{}", r.violations));
            if threads == 2 * n {
                check_progress(&r, format!("{lock}x{threads}"));
            }
        }
    }
    // the mutable lock's window ceiling at both ends
    for max_sws in [1, n as u32] {
        if max_sws == n as u32 {
            continue; // measured above with the default ceiling
        }
        let r = stress(LockKind::Mutlock, 2 * n, max_sws, SECS);
        violations += r.violations;
        check_progress(&r, format!("mutlock(max_sws={max_sws})x{}", 2 * n));
    }
    (
        outcome(
            violations == 0,
            format!("{violations} violations [{}]", mx_notes.join(" ")),
        ),
        outcome(progress_ok, progress_notes.join("; ")),
    )
}

// 5. oracle dynamics
fn oracle_dynamics() -> Outcome {
    // (a) a late wake-up doubles the window
    let mut o = SwsOracle::new(10);
    let doubled = o.eval(false, true, 3).get() == 3 && o.count() == 0;

    // (b) ten quiet critical sections shrink it by one
    let mut o = SwsOracle::new(10);
    let quiet: Vec<i64> = (0..10)
        .map(|i| o.eval(i % 2 == 0, i % 3 == 0 && i % 2 == 0, 5).get())
        .collect();
    let decays = quiet[..9].iter().all(|&d| d == 0) && quiet[9] == -1 && o.count() == 0;

    // (c) clamp-and-apply never leaves [1, max]
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut escaped = 0u64;
    let mut cnt_overflow = 0u64;
    for _ in 0..100_000 {
        let max = rng.gen_range(1..=64u32);
        let period = rng.gen_range(1..=12u32);
        let mut o = SwsOracle::new(period);
        let mut sws = rng.gen_range(1..=max);
        for _ in 0..40 {
            let (spun, slept) = (rng.gen_bool(0.5), rng.gen_bool(0.3));
            let d = o.eval(spun, slept, sws);
            let d = clamp_delta(sws, d.get(), max).get();
            sws = (i64::from(sws) + d) as u32;
            escaped += u64::from(!(1..=max).contains(&sws));
            cnt_overflow += u64::from(o.count() >= period);
        }
    }
    outcome(
        doubled && decays && escaped == 0 && cnt_overflow == 0,
        format!("double={doubled} decay={decays} out_of_range={escaped} cnt>=K={cnt_overflow} over 1e5 sequences"),
    )
}

// 6. packed state
fn packed_state() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0u32;
    for _ in 0..1_000_000 {
        let (sws, thc) = (rng.gen::<u32>(), rng.gen::<u32>());
        let s = LockState::pack(sws, thc);
        bad += u32::from(s.unpack() != (sws, thc));
        if thc < u32::MAX {
            bad += u32::from(LockState::from_word(s.word() + 1).unpack() != (sws, thc + 1));
        }
        let x = rng.gen_range(0..1024u32);
        let moved = LockState::from_word(s.word().wrapping_add(u64::from(x) << 32));
        bad += u32::from(moved.unpack() != (sws.wrapping_add(x), thc));
    }
    outcome(bad == 0, format!("{bad} failures over 1e6 pairs"))
}

// 7. directional hardware comparison
//
// Each lock gets 10 s of measurement, taken as 5 interleaved rounds of 2 s so
// that slow drift of the host affects all three locks alike.
fn hardware_direction() -> Outcome {
    const ROUNDS: u64 = 5;
    let start = Instant::now();
    let n = cores();
    let locks = [LockKind::Mutlock, LockKind::Ttas, LockKind::Sleep];
    let mut cs = [0u64; 3];
    let mut cpu = [0f64; 3];
    let mut wall = [0f64; 3];
    for round in 0..ROUNDS {
        for (i, &lock) in locks.iter().enumerate() {
            let c = BenchConfig::new(lock, 2 * n)
                .cs(0.0, 366.0)
                .ncs(0.0, 3.7)
                .duration(Duration::from_secs(2));
            let r = run_once(&c, 7 + round).expect("bench run");
            cs[i] += r.cs_count;
            cpu[i] += r.sync_cpu;
            wall[i] += r.wall;
        }
    }
    let elapsed = start.elapsed();
    let tput: Vec<f64> = (0..3).map(|i| cs[i] as f64 / wall[i]).collect();
    let (mutlock, ttas, sleep) = (0, 1, 2);
    let best = tput[ttas].max(tput[sleep]);
    let pass = cpu[mutlock] <= 0.5 * cpu[ttas]
        && tput[mutlock] >= 0.9 * best
        && elapsed <= Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "threads={} mutlock {:.0} cs/s {:.3}s cpu; ttas {:.0} cs/s {:.3}s cpu; sleep {:.0} cs/s {:.3}s cpu; {:?}",
            2 * n,
            tput[mutlock],
            cpu[mutlock],
            tput[ttas],
            cpu[ttas],
            tput[sleep],
            cpu[sleep],
            elapsed
        ),
    )
}

// 8. report math on hand-computed fixtures
fn report_math() -> Outcome {
    let q = Exact::new;
    // two runs per cell whose mean is the cell value
    let cells = [
        ("ttas", 2, 120.0),
        ("sleep", 2, 60.0),
        ("mutlock", 2, 90.0),
        ("ttas", 4, 80.0),
        ("sleep", 4, 100.0),
        ("mutlock", 4, 50.0),
        ("ttas", 8, 30.0),
        ("sleep", 8, 60.0),
        ("mutlock", 8, 60.0),
    ];
    let records: Vec<BenchRecord> = cells
        .iter()
        .flat_map(|&(lock, threads, v)| {
            [v - 10.0, v + 10.0]
                .into_iter()
                .enumerate()
                .map(move |(run, tput)| BenchRecord {
                    lock: lock.into(),
                    threads,
                    csl_us: 0.0,
                    csu_us: 3.7,
                    ncsl_us: 0.0,
                    ncsu_us: 3.7,
                    run: run as u32,
                    seed: run as u64,
                    wall_s: 1.0,
                    cs_count: tput as u64,
                    throughput_cs_per_s: tput,
                    sync_cpu_s: 0.5,
                })
        })
        .collect();
    let rows = aggregate::<Exact>(&records).expect("fixture aggregates");
    let ratios = ratio_to_optimum(&rows);
    let ratio = |lock: &str| ratios.iter().find(|r| r.lock == lock).and_then(|r| r.ratio);
    // ttas: (1 + 4/5 + 1/2)/3, sleep: (1/2 + 1 + 1)/3, mutlock: (3/4 + 1/2 + 1)/3
    let ratios_ok = ratio("ttas") == Some(q(23, 30))
        && ratio("sleep") == Some(q(5, 6))
        && ratio("mutlock") == Some(q(3, 4));
    let pt = pt_exp(&rows, "ttas", "sleep").expect("both inputs present");
    let pt_vals: Vec<(usize, Exact)> = pt.iter().map(|r| (r.threads, r.mean_throughput)).collect();
    let pt_ok = pt_vals == vec![(2, q(90, 1)), (4, q(90, 1)), (8, q(45, 1))];
    outcome(
        ratios_ok && pt_ok,
        format!(
            "ratios ttas={:?} sleep={:?} mutlock={:?}; pt_exp={:?}",
            ratio("ttas").map(|r| r.to_string()),
            ratio("sleep").map(|r| r.to_string()),
            ratio("mutlock").map(|r| r.to_string()),
            pt_vals
                .iter()
                .map(|(t, v)| format!("{t}:{v}"))
                .collect::<Vec<_>>()
        ),
    )
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters pass arguments; only run on a plain
    // invocation or an explicit `acceptance` filter
    let args: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }
    let strict_hw = std::env::var("MUTLOCK_STRICT_HW").is_ok_and(|v| v == "1");
    println!("acceptance suite on {} logical cores", cores());

    // MUTLOCK_CRITERIA=1,7 runs a subset
    let selected: Option<BTreeSet<u8>> = std::env::var("MUTLOCK_CRITERIA")
        .ok()
        .map(|v| v.split(',').filter_map(|c| c.trim().parse().ok()).collect());
    let wanted = |id: u8| selected.as_ref().is_none_or(|s| s.contains(&id));

    let mut results: Vec<(u8, &str, Outcome, bool)> = Vec::new();
    if wanted(1) {
        results.push((1, "simulator golden traces", simulator_golden(), true));
    }
    if wanted(2) {
        results.push((
            2,
            "bookkeeping oracle equivalence",
            bookkeeping_equivalence(),
            true,
        ));
    }
    if wanted(5) {
        results.push((5, "oracle dynamics", oracle_dynamics(), true));
    }
    if wanted(6) {
        results.push((6, "packed-state correctness", packed_state(), true));
    }
    if wanted(8) {
        results.push((8, "report math fixtures", report_math(), true));
    }
    if wanted(3) || wanted(4) {
        let (mx, progress) = stress_criteria();
        results.push((3, "mutual exclusion stress", mx, true));
        results.push((4, "progress / no lost wake-ups", progress, true));
    }
    if wanted(7) {
        results.push((
            7,
            "directional hardware check",
            hardware_direction(),
            strict_hw,
        ));
    }
    results.sort_by_key(|r| r.0);

    let mut failed = false;
    for (id, name, o, enforced) in &results {
        let tag = match (o.pass, enforced) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (reported, not enforced)",
        };
        println!("[{tag}] criterion {id}: {name}: {}", o.detail);
        failed |= !o.pass && *enforced;
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
