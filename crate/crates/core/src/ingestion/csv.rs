//! Event tables: one row per event with a case id, an activity and
//! optionally an ordering index.
//!
//! Columns are found by header name, case-insensitively: `case`, `case_id`,
//! `case-id`, `caseid` or `case:concept:name` for the case; `activity`,
//! `activity_name` or `concept:name` for the activity; `index`, `order`,
//! `position` or `seq` for the ordering. Without an index column, rows keep
//! file order. Cases appear in order of their first row.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Location, ParseError};
use crate::log_model::{Activity, ActivityTrace};

use super::{LogEntry, ParsedLog};

const FORMAT: &str = "csv";

const CASE_COLUMNS: &[&str] = &["case", "case_id", "case-id", "caseid", "case:concept:name"];
const ACTIVITY_COLUMNS: &[&str] = &["activity", "activity_name", "concept:name"];
const INDEX_COLUMNS: &[&str] = &["index", "order", "position", "seq"];

pub fn parse_csv(bytes: &[u8]) -> Result<ParsedLog, ParseError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(ParsedLog::default());
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let err_at = |e: &csv::Error| {
        let location = e
            .position()
            .map_or(Location::Unknown, |p| Location::Row(p.line() as usize));
        ParseError::new(FORMAT, location, e.to_string())
    };
    let headers = reader.headers().map_err(|e| err_at(&e))?.clone();
    let find = |names: &[&str]| {
        headers
            .iter()
            .position(|h| names.iter().any(|n| h.eq_ignore_ascii_case(n)))
    };
    let header_err = |m: &str| ParseError::new(FORMAT, Location::Row(1), m);
    let case_col = find(CASE_COLUMNS).ok_or_else(|| header_err("no case id column"))?;
    let act_col = find(ACTIVITY_COLUMNS).ok_or_else(|| header_err("no activity column"))?;
    let idx_col = find(INDEX_COLUMNS);

    let mut order: Vec<String> = Vec::new();
    let mut cases: HashMap<String, BTreeMap<(i64, usize), Activity>> = HashMap::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| err_at(&e))?;
        let row = record.position().map_or(n + 2, |p| p.line() as usize);
        let at = |m: String| ParseError::new(FORMAT, Location::Row(row), m);
        let field = |i: usize| record.get(i).ok_or_else(|| at(format!("missing column {}", i + 1)));
        let case = field(case_col)?.to_string();
        let name = field(act_col)?;
        if name.is_empty() {
            return Err(at("empty activity".into()));
        }
        let activity = Activity::new(name).map_err(|e| at(e.to_string()))?;
        let key = match idx_col {
            Some(c) => {
                let raw = field(c)?;
                let idx: i64 = raw.parse().map_err(|_| at(format!("invalid index {raw:?}")))?;
                (idx, 0)
            }
            None => (0, n),
        };
        let events = cases.entry(case.clone()).or_insert_with(|| {
            order.push(case.clone());
            BTreeMap::new()
        });
        if events.insert(key, activity).is_some() {
            return Err(at(format!("duplicate index {} in case {case:?}", key.0)));
        }
    }

    let entries = order
        .into_iter()
        .map(|case| {
            let trace: ActivityTrace = cases.remove(&case).unwrap_or_default().into_values().collect();
            LogEntry {
                id: case,
                trace,
                count: 1,
            }
        })
        .collect();
    Ok(ParsedLog { alphabet: None, entries })
}
