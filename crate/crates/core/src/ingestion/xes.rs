//! The XES subset: `<trace>` elements holding `<event>` elements, where an
//! event's activity is its `concept:name` string attribute. A trace's own
//! `concept:name` becomes its id. Everything else is ignored.

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Location, ParseError};
use crate::log_model::{Activity, ActivityLog, ActivityTrace};

use super::{LogEntry, ParsedLog};

const FORMAT: &str = "xes";
const NAME_KEY: &str = "concept:name";

#[derive(PartialEq)]
enum Scope {
    Trace,
    Event,
    Other,
}

pub fn parse_xes(bytes: &[u8]) -> Result<ParsedLog, ParseError> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();
    let mut stack: Vec<Scope> = Vec::new();
    let mut entries = Vec::new();
    let mut trace: Option<(Option<String>, Vec<Activity>)> = None;
    let mut event: Option<Option<Activity>> = None;
    let mut seen_root = false;

    loop {
        let pos = reader.buffer_position();
        let xml_err = |m: String| ParseError::new(FORMAT, Location::Byte(pos), m);
        let ev = reader.read_event_into(&mut buf).map_err(|e| xml_err(e.to_string()))?;
        let trace_no = entries.len() + 1;
        let trace_err = |m: String| ParseError::new(FORMAT, Location::Trace(trace_no), m);
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(ev, Event::Empty(_));
                seen_root = true;
                let local = e.local_name();
                let scope = match local.as_ref() {
                    b"trace" if stack.len() == 1 && trace.is_none() => {
                        trace = Some((None, Vec::new()));
                        Scope::Trace
                    }
                    b"event" if stack.last() == Some(&Scope::Trace) => {
                        event = Some(None);
                        Scope::Event
                    }
                    b"string" => {
                        if let Some(value) = name_value(e).map_err(&xml_err)? {
                            match stack.last() {
                                Some(Scope::Event) => {
                                    let a = Activity::new(&value).map_err(|err| trace_err(err.to_string()))?;
                                    event = Some(Some(a));
                                }
                                Some(Scope::Trace) => {
                                    if let Some(t) = trace.as_mut() {
                                        t.0 = Some(value);
                                    }
                                }
                                _ => {}
                            }
                        }
                        Scope::Other
                    }
                    _ => Scope::Other,
                };
                if empty {
                    close(scope, &mut trace, &mut event, &mut entries).map_err(&trace_err)?;
                } else {
                    stack.push(scope);
                }
            }
            Event::End(_) => {
                let scope = stack.pop().ok_or_else(|| xml_err("unexpected closing tag".into()))?;
                close(scope, &mut trace, &mut event, &mut entries).map_err(&trace_err)?;
            }
            Event::Eof => {
                if !stack.is_empty() {
                    return Err(xml_err("unexpected end of document".into()));
                }
                if !seen_root && !bytes.iter().all(u8::is_ascii_whitespace) {
                    return Err(xml_err("no root element".into()));
                }
                break;
            }
            Event::Text(ref t) if stack.is_empty() && t.iter().any(|b| !b.is_ascii_whitespace()) => {
                return Err(xml_err("text outside the root element".into()));
            }
            _ => {}
        }
        buf.clear();
    }
    Ok(ParsedLog { alphabet: None, entries })
}

fn name_value(e: &BytesStart<'_>) -> Result<Option<String>, String> {
    let mut key = None;
    let mut value = None;
    for attr in e.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let v = attr.unescape_value().map_err(|e| e.to_string())?.into_owned();
        match attr.key.as_ref() {
            b"key" => key = Some(v),
            b"value" => value = Some(v),
            _ => {}
        }
    }
    Ok(if key.as_deref() == Some(NAME_KEY) { value } else { None })
}

fn close(
    scope: Scope,
    trace: &mut Option<(Option<String>, Vec<Activity>)>,
    event: &mut Option<Option<Activity>>,
    entries: &mut Vec<LogEntry>,
) -> Result<(), String> {
    match scope {
        Scope::Event => {
            let n = trace.as_ref().map_or(0, |t| t.1.len()) + 1;
            let activity = event
                .take()
                .flatten()
                .ok_or_else(|| format!("event {n} has no {NAME_KEY} attribute"))?;
            if let Some(t) = trace.as_mut() {
                t.1.push(activity);
            }
        }
        Scope::Trace => {
            if let Some((id, events)) = trace.take() {
                let id = id.unwrap_or_else(|| (entries.len() + 1).to_string());
                entries.push(LogEntry {
                    id,
                    trace: ActivityTrace::new(events),
                    count: 1,
                });
            }
        }
        Scope::Other => {}
    }
    Ok(())
}

fn escape(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

/// A minimal XES document for `log`, one `<trace>` per trace occurrence.
pub fn write_xes(log: &ActivityLog) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log xes.version=\"1.0\">\n");
    let mut n = 0;
    for (trace, count) in log.iter() {
        for _ in 0..count {
            n += 1;
            out.push_str(&format!("  <trace>\n    <string key=\"{NAME_KEY}\" value=\"{n}\"/>\n"));
            for a in trace {
                out.push_str(&format!(
                    "    <event><string key=\"{NAME_KEY}\" value=\"{}\"/></event>\n",
                    escape(a.label())
                ));
            }
            out.push_str("  </trace>\n");
        }
    }
    out.push_str("</log>\n");
    out
}
