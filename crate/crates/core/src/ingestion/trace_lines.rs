//! One trace per line.
//!
//! ```text
//! # comment
//! #alphabet: a1,a2,a3
//! a1,a2,a4,a5,a8 ×4
//! a1,"odd, name",a3
//! <>
//! ```
//!
//! Activities are separated by the delimiter (`,` unless configured).
//! Whitespace around tokens is ignored. A line may end in ` ×k` to repeat
//! the trace k times, and `<>` is the empty trace. Blank lines are skipped,
//! and lines starting with `#` are comments, except for the optional
//! `#alphabet:` directive, which declares the alphabet (it may include
//! activities that never occur).
//!
//! A token is written in double quotes, with `""` for a literal quote, when
//! it contains the delimiter or any of `, " × ( ) { }` or a tab, starts with
//! `#`, has leading or trailing whitespace, or is exactly `<>`.

use std::borrow::Cow;
use std::collections::BTreeSet;

use crate::error::{Location, ParseError};
use crate::log_model::{Activity, ActivityLog, ActivityTrace};

use super::{LogEntry, ParsedLog};

const FORMAT: &str = "trace-lines";
const TIMES: char = '×';
const EMPTY_TRACE: &str = "<>";
const ALPHABET_DIRECTIVE: &str = "#alphabet:";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceLinesOptions {
    pub delimiter: char,
}

impl Default for TraceLinesOptions {
    fn default() -> Self {
        TraceLinesOptions { delimiter: ',' }
    }
}

impl TraceLinesOptions {
    fn check(&self) -> Result<(), String> {
        let d = self.delimiter;
        if d == '"' || d == TIMES || d == '#' || d == '\n' || d == '\r' || (d.is_whitespace() && d != '\t') {
            return Err(format!("{d:?} cannot be used as a delimiter"));
        }
        Ok(())
    }
}

pub fn needs_quotes(token: &str, delimiter: char) -> bool {
    token.is_empty()
        || token == EMPTY_TRACE
        || token.starts_with('#')
        || token.starts_with(char::is_whitespace)
        || token.ends_with(char::is_whitespace)
        || token
            .chars()
            .any(|c| c == delimiter || matches!(c, ',' | '"' | TIMES | '(' | ')' | '{' | '}' | '\t'))
}

/// `token`, quoted if the rules require it.
pub fn quote(token: &str, delimiter: char) -> Cow<'_, str> {
    if needs_quotes(token, delimiter) {
        Cow::Owned(format!("\"{}\"", token.replace('"', "\"\"")))
    } else {
        Cow::Borrowed(token)
    }
}

pub(crate) fn join(tokens: impl IntoIterator<Item = impl AsRef<str>>, delimiter: char) -> String {
    let mut out = String::new();
    for (i, t) in tokens.into_iter().enumerate() {
        if i > 0 {
            out.push(delimiter);
        }
        out.push_str(&quote(t.as_ref(), delimiter));
    }
    out
}

/// A line split into tokens, plus the frequency suffix if present. The
/// bool per token records whether it was quoted.
pub(crate) struct Split {
    pub tokens: Vec<(String, bool)>,
    pub count: Option<usize>,
}

pub(crate) fn split(line: &str, delimiter: char, allow_count: bool) -> Result<Split, String> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    let mut tokens = Vec::new();
    let skip_space = |i: &mut usize| {
        while *i < chars.len() && chars[*i] != delimiter && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_space(&mut i);
        let quoted = i < chars.len() && chars[i] == '"';
        let token = if quoted {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err("unterminated quoted token".into()),
                    Some('"') if chars.get(i + 1) == Some(&'"') => {
                        s.push('"');
                        i += 2;
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(&c) => {
                        s.push(c);
                        i += 1;
                    }
                }
            }
            skip_space(&mut i);
            s
        } else {
            let start = i;
            while i < chars.len() && chars[i] != delimiter && chars[i] != TIMES {
                if chars[i] == '"' {
                    return Err("quote inside an unquoted token".into());
                }
                i += 1;
            }
            chars[start..i].iter().collect::<String>().trim_end().to_string()
        };
        if token.is_empty() && !quoted {
            return Err("empty activity".into());
        }
        tokens.push((token, quoted));
        match chars.get(i) {
            None => return Ok(Split { tokens, count: None }),
            Some(&c) if c == delimiter => i += 1,
            Some(&TIMES) if allow_count => {
                let digits: String = chars[i + 1..].iter().collect();
                let digits = digits.trim();
                let n: usize = digits
                    .parse()
                    .map_err(|_| format!("invalid frequency {digits:?} after ×"))?;
                if n == 0 {
                    return Err("frequency must be at least 1".into());
                }
                return Ok(Split { tokens, count: Some(n) });
            }
            Some(&c) => return Err(format!("unexpected {c:?} after token")),
        }
    }
}

/// Parses a comma-separated activity list with the token quoting rules.
/// Marker labels are accepted. The empty string is the empty set.
pub fn parse_activity_list(s: &str) -> Result<BTreeSet<Activity>, String> {
    if s.trim().is_empty() {
        return Ok(BTreeSet::new());
    }
    split(s, ',', false)?
        .tokens
        .into_iter()
        .map(|(t, _)| Activity::from_label(&t).map_err(|e| e.to_string()))
        .collect()
}

/// Inverse of [`parse_activity_list`].
pub fn format_activity_list<'a>(activities: impl IntoIterator<Item = &'a Activity>) -> String {
    join(activities.into_iter().map(Activity::label), ',')
}

fn activity(name: String) -> Result<Activity, String> {
    Activity::new(&name).map_err(|e| e.to_string())
}

pub fn parse_trace_lines(text: &str, options: &TraceLinesOptions) -> Result<ParsedLog, ParseError> {
    options.check().map_err(|m| ParseError::new(FORMAT, Location::Unknown, m))?;
    let mut parsed = ParsedLog::default();
    for (n, raw) in text.lines().enumerate() {
        let at = |m: String| ParseError::new(FORMAT, Location::Line(n + 1), m);
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(ALPHABET_DIRECTIVE) {
            if parsed.alphabet.is_some() {
                return Err(at("duplicate alphabet directive".into()));
            }
            let mut alphabet = BTreeSet::new();
            if !rest.trim().is_empty() {
                for (t, _) in split(rest, options.delimiter, false).map_err(at)?.tokens {
                    alphabet.insert(activity(t).map_err(at)?);
                }
            }
            parsed.alphabet = Some(alphabet);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let split = split(line, options.delimiter, true).map_err(at)?;
        let trace = if let [(t, false)] = split.tokens.as_slice() {
            if t == EMPTY_TRACE {
                ActivityTrace::empty()
            } else {
                ActivityTrace::new(vec![activity(t.clone()).map_err(at)?])
            }
        } else {
            let mut acts = Vec::with_capacity(split.tokens.len());
            for (t, quoted) in split.tokens {
                if t == EMPTY_TRACE && !quoted {
                    return Err(at("<> must stand alone".into()));
                }
                acts.push(activity(t).map_err(at)?);
            }
            ActivityTrace::new(acts)
        };
        let id = (parsed.entries.len() + 1).to_string();
        parsed.entries.push(LogEntry {
            id,
            trace,
            count: split.count.unwrap_or(1),
        });
    }
    if let Some(alphabet) = &parsed.alphabet {
        for e in &parsed.entries {
            if let Some(a) = e.trace.iter().find(|a| !alphabet.contains(a)) {
                return Err(ParseError::new(
                    FORMAT,
                    Location::Trace(e.id.parse().unwrap_or(0)),
                    format!("activity {a} is not in the declared alphabet"),
                ));
            }
        }
    }
    Ok(parsed)
}

/// One line per distinct trace, in trace order, with ` ×k` for k > 1. The
/// alphabet directive is written only when the alphabet has activities that
/// no trace contains.
pub fn write_trace_lines(log: &ActivityLog, options: &TraceLinesOptions) -> String {
    let d = options.delimiter;
    let mut out = String::new();
    let observed: BTreeSet<&Activity> = log.iter().flat_map(|(t, _)| t.iter()).collect();
    if observed.len() != log.alphabet().len() {
        out.push_str(ALPHABET_DIRECTIVE);
        out.push(' ');
        out.push_str(&join(log.alphabet().iter().map(Activity::label), d));
        out.push('\n');
    }
    for (trace, count) in log.iter() {
        if trace.is_empty() {
            out.push_str(EMPTY_TRACE);
        } else {
            out.push_str(&join(trace.iter().map(Activity::label), d));
        }
        if count > 1 {
            out.push_str(&format!(" {TIMES}{count}"));
        }
        out.push('\n');
    }
    out
}
