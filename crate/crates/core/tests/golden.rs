//! Frozen renderings. Set `LOGSKEL_BLESS=1` to rewrite the files after an
//! intended change, then review the diff.

mod common;

use std::path::PathBuf;

use log_skeleton::render::{emit_graph, to_dot, ViewConfig};
use log_skeleton::LogSkeleton;

fn check(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("LOGSKEL_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{} is stale", path.display());
}

#[test]
fn l1_default_view() {
    let dot = to_dot(&emit_graph(&LogSkeleton::build(&common::l1()), &ViewConfig::default()).unwrap());
    check("l1_default.dot", &dot);
}
