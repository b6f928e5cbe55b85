//! Random logs and traces for property tests.

use std::collections::BTreeSet;

use log_skeleton::{Activity, ActivityLog, ActivityTrace, Bag};
use proptest::prelude::*;

pub const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn alphabet(n: usize) -> BTreeSet<Activity> {
    NAMES[..n].iter().map(|s| Activity::new(s).unwrap()).collect()
}

pub fn trace_over(n: usize, max_len: usize) -> impl Strategy<Value = ActivityTrace> {
    prop::collection::vec(0..n, 0..=max_len)
        .prop_map(|ix| ix.into_iter().map(|i| Activity::new(NAMES[i]).unwrap()).collect())
}

/// A log over the first `n` names with up to `max_traces` traces of
/// length ≤ `max_len`. The whole prefix of names is declared, so some
/// activities may never occur.
pub fn log_over(n: usize, max_traces: usize, max_len: usize) -> impl Strategy<Value = ActivityLog> {
    prop::collection::vec(trace_over(n, max_len), 0..=max_traces).prop_map(move |traces| {
        let bag: Bag<ActivityTrace> = traces.into_iter().collect();
        ActivityLog::new(alphabet(n), bag).unwrap()
    })
}

/// Logs with 1–6 activities, ≤ 20 traces of length ≤ 12.
pub fn small_log() -> impl Strategy<Value = ActivityLog> {
    (1..=6usize).prop_flat_map(|n| log_over(n, 20, 12))
}
