use mutlock::model::{simulate, Activity, Policy, SimConfig, SimError};
use mutlock::Exact;
use proptest::prelude::*;

fn run(threads: usize, policy: Policy, sws: usize) -> mutlock::model::SimTrace {
    let mut c = SimConfig::new(threads, policy);
    c.sws = sws;
    simulate(&c).unwrap()
}

#[test]
fn three_thread_timelines() {
    let spin = run(3, Policy::SpinOnly, 1);
    assert_eq!(
        spin.render_text(),
        "  slot   1  2  3\n    T1   X  .  .\n    T2   s  X  .\n    T3   s  s  X\n"
    );
    assert_eq!(spin.waste_fraction::<Exact>(), Exact::new(1, 2));

    let sleep = run(3, Policy::SleepOnly, 1);
    assert_eq!(sleep.completion_slot, 5);
    assert_eq!(sleep.wasted_wake_slots, 2);
    let slowdown =
        Exact::from_integer(1) - sleep.throughput::<Exact>() / spin.throughput::<Exact>();
    assert_eq!(slowdown, Exact::new(2, 5));

    let hybrid = run(3, Policy::Hybrid, 1);
    assert_eq!(hybrid.completion_slot, 3);
    assert_eq!(hybrid.wasted_slots(), 2);
}

#[test]
fn csv_trace_has_one_row_per_thread_slot() {
    let t = run(4, Policy::Hybrid, 2);
    let csv = t.render_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("slot,thread,activity"));
    assert_eq!(lines.count(), 4 * t.slots.len());
}

#[test]
fn rejects_bad_configs() {
    assert_eq!(
        simulate(&SimConfig::new(0, Policy::SpinOnly)),
        Err(SimError::NoThreads)
    );
    let mut c = SimConfig::new(2, Policy::Hybrid);
    c.sws = 0;
    assert!(simulate(&c).is_err());
    c.sws = 1;
    c.cs_slots = 0;
    assert!(simulate(&c).is_err());
    assert!("bogus".parse::<Policy>().is_err());
}

fn policy() -> impl Strategy<Value = Policy> {
    prop_oneof![
        Just(Policy::SpinOnly),
        Just(Policy::SleepOnly),
        Just(Policy::Hybrid)
    ]
}

proptest! {
    #[test]
    fn invariants(threads in 1usize..10, p in policy(), sws in 1usize..6, cs in 1u32..4, wake in 0u32..4) {
        let c = SimConfig { threads, policy: p, sws, cs_slots: cs, wake_slots: wake };
        let t = simulate(&c).unwrap();
        prop_assert_eq!(&simulate(&c).unwrap(), &t);
        prop_assert_eq!(t.cs_count, threads);
        prop_assert_eq!(t.cs_slots, threads * cs as usize);
        prop_assert_eq!(t.completion_slot, t.slots.len());
        let limit = match p {
            Policy::SpinOnly => threads,
            Policy::SleepOnly => 0,
            Policy::Hybrid => sws,
        };
        for (s, row) in t.slots.iter().enumerate() {
            prop_assert!(t.spinners_in_slot(s) <= limit);
            prop_assert!(row.iter().filter(|&&a| a == Activity::Cs).count() <= 1);
        }
        // each thread runs its critical section contiguously, once
        for th in 0..threads {
            let cols: Vec<usize> = (0..t.slots.len()).filter(|&s| t.slots[s][th] == Activity::Cs).collect();
            prop_assert_eq!(cols.len(), cs as usize);
            prop_assert_eq!(cols[cols.len() - 1] - cols[0] + 1, cs as usize);
        }
        if p == Policy::SpinOnly {
            prop_assert_eq!(t.completion_slot, threads * cs as usize);
            prop_assert_eq!(t.wasted_wake_slots, 0);
        }
    }
}
