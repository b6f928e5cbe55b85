//! Reading and writing logs and classification reports.
//!
//! Three log formats are supported: a minimal XES subset (trace and event
//! elements, `concept:name` only), CSV event tables, and the line-based
//! trace format described in [`trace_lines`].

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::log_model::{Activity, ActivityLog, ActivityTrace, LabeledTrace};

pub mod csv;
pub mod report;
pub mod trace_lines;
pub mod xes;

pub use self::report::{parse_report, parse_report_json, write_report, write_report_json};
pub use self::trace_lines::{
    format_activity_list, parse_activity_list, parse_trace_lines, write_trace_lines, TraceLinesOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogFormat {
    Xes,
    Csv,
    TraceLines,
}

impl LogFormat {
    pub fn name(self) -> &'static str {
        match self {
            LogFormat::Xes => "xes",
            LogFormat::Csv => "csv",
            LogFormat::TraceLines => "trace-lines",
        }
    }

    /// Guesses the format from a file extension; anything unrecognized is
    /// read as trace lines.
    pub fn from_path(path: &Path) -> LogFormat {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("xes") | Some("xml") => LogFormat::Xes,
            Some("csv") => LogFormat::Csv,
            _ => LogFormat::TraceLines,
        }
    }
}

impl fmt::Display for LogFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xes" => Ok(LogFormat::Xes),
            "csv" => Ok(LogFormat::Csv),
            "trace-lines" | "trace_lines" | "lines" | "txt" => Ok(LogFormat::TraceLines),
            other => Err(Error::invalid(format!("unknown log format {other:?}"))),
        }
    }
}

/// One trace as read, with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub id: String,
    pub trace: ActivityTrace,
    pub count: usize,
}

/// A log in input order, before collapsing into a multiset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedLog {
    /// Declared alphabet, if the format carries one.
    pub alphabet: Option<BTreeSet<Activity>>,
    pub entries: Vec<LogEntry>,
}

impl ParsedLog {
    pub fn into_log(self) -> Result<ActivityLog> {
        let traces = self.entries.into_iter().map(|e| (e.trace, e.count));
        match self.alphabet {
            Some(alphabet) => ActivityLog::new(alphabet, traces.collect()),
            None => ActivityLog::from_traces(traces),
        }
    }

    /// One labeled trace per occurrence; an entry with count k > 1 becomes
    /// ids `id.1` … `id.k`.
    pub fn into_labeled(self) -> Vec<LabeledTrace> {
        let mut out = Vec::new();
        for e in self.entries {
            if e.count == 1 {
                out.push(LabeledTrace::new(e.id, e.trace));
            } else {
                out.extend((1..=e.count).map(|j| LabeledTrace::new(format!("{}.{j}", e.id), e.trace.clone())));
            }
        }
        out
    }
}

/// Parses `bytes` in `format` with default options.
pub fn parse(bytes: &[u8], format: LogFormat) -> Result<ParsedLog, ParseError> {
    match format {
        LogFormat::Xes => xes::parse_xes(bytes),
        LogFormat::Csv => csv::parse_csv(bytes),
        LogFormat::TraceLines => {
            let text = std::str::from_utf8(bytes).map_err(|e| {
                ParseError::new("trace-lines", crate::error::Location::Byte(e.valid_up_to() as u64), "input is not UTF-8")
            })?;
            parse_trace_lines(text, &TraceLinesOptions::default())
        }
    }
}

/// Parses `bytes` into an activity log.
pub fn parse_log(bytes: &[u8], format: LogFormat) -> Result<ActivityLog> {
    parse(bytes, format)?.into_log()
}

/// Reads a log file, choosing the format from its extension unless given.
pub fn read_log(path: &Path, format: Option<LogFormat>) -> Result<ParsedLog, ReadError> {
    let bytes = std::fs::read(path).map_err(|source| ReadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse(&bytes, format.unwrap_or_else(|| LogFormat::from_path(path)))?)
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}
