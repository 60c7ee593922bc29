/// Wake-up correction owed after resizing the window by `delta`, written
/// directly from the two desynchronization conditions.
///
/// Growth with sleepers past the old bound (`delta > 0 && thc > sws`) wakes
/// `min(|delta|, thc - sws)` extra threads. Shrinking below the number of
/// active threads (`delta < 0 && thc > sws + delta`) skips
/// `min(|delta|, thc - (sws + delta))` wake-ups, returned negated.
pub fn check_c1_c2(thc: u32, sws: u32, delta: i64) -> i64 {
    let thc = i64::from(thc);
    let sws = i64::from(sws);
    debug_assert!(sws >= 1 && sws + delta >= 1);
    if delta > 0 && thc > sws {
        delta.abs().min(thc - sws)
    } else if delta < 0 && thc > sws + delta {
        -delta.abs().min(thc - (sws + delta))
    } else {
        0
    }
}
