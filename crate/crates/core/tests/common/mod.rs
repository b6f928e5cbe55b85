#![allow(dead_code)]

pub mod checks;
pub mod gen;
pub mod oracle;
pub mod process;

use log_skeleton::ingestion::{self, LogFormat};
use log_skeleton::{Activity, ActivityLog, ActivityTrace};

pub const L1_LINES: &str = include_str!("../fixtures/l1.txt");
pub const L1_XES: &str = include_str!("../fixtures/l1.xes");

pub fn l1() -> ActivityLog {
    ingestion::parse_log(L1_LINES.as_bytes(), LogFormat::TraceLines).expect("L1 fixture parses")
}

pub fn a(name: &str) -> Activity {
    Activity::new(name).unwrap()
}

pub fn t(names: &[&str]) -> ActivityTrace {
    ActivityTrace::from_names(names).unwrap()
}

pub fn set(names: &[&str]) -> std::collections::BTreeSet<Activity> {
    names.iter().map(|n| a(n)).collect()
}
