//! Classification reports.
//!
//! The text report is tab separated with a header row (tabs shown as
//! spaces):
//!
//! ```text
//! id  label     reason  witness  required  forbidden
//! 1   positive  +
//! 2   negative  eq      (a3,a5)  {}        {a2}
//! ```
//!
//! Witness and set cells quote activity names with the trace-lines rules.
//! The JSON report is the verdict list as pretty-printed JSON.

use std::collections::BTreeSet;

use crate::classifier::{ClassificationVerdict, Label, Reason, Witness};
use crate::error::{Location, ParseError};
use crate::log_model::{Activity, FilterSpec};

use super::trace_lines::{join, split};

const FORMAT: &str = "report";
const HEADER: [&str; 6] = ["id", "label", "reason", "witness", "required", "forbidden"];

fn label_name(label: Label) -> &'static str {
    match label {
        Label::Positive => "positive",
        Label::Negative => "negative",
    }
}

pub fn format_pair(pair: &(Activity, Activity)) -> String {
    format!("({})", join([pair.0.label(), pair.1.label()], ','))
}

pub fn format_set(set: &BTreeSet<Activity>) -> String {
    format!("{{{}}}", join(set.iter().map(Activity::label), ','))
}

pub fn write_report(verdicts: &[ClassificationVerdict]) -> String {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .flexible(true)
        .from_writer(Vec::new());
    w.write_record(HEADER).expect("writing to memory");
    for v in verdicts {
        let mut row = vec![v.id.clone(), label_name(v.label).to_string(), v.reason.code().to_string()];
        if let Some(wit) = &v.witness {
            row.push(format_pair(&wit.pair));
            row.push(format_set(wit.spec.required()));
            row.push(format_set(wit.spec.forbidden()));
        }
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("report is UTF-8")
}

pub fn write_report_json(verdicts: &[ClassificationVerdict]) -> String {
    let mut s = serde_json::to_string_pretty(verdicts).expect("verdicts serialize");
    s.push('\n');
    s
}

fn activities(inner: &str) -> Result<Vec<Activity>, String> {
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    split(inner, ',', false)?
        .tokens
        .into_iter()
        .map(|(t, _)| Activity::from_label(&t).map_err(|e| e.to_string()))
        .collect()
}

fn delimited(cell: &str, open: char, close: char) -> Result<&str, String> {
    cell.strip_prefix(open)
        .and_then(|c| c.strip_suffix(close))
        .ok_or_else(|| format!("expected {open}…{close}, found {cell:?}"))
}

fn parse_pair(cell: &str) -> Result<(Activity, Activity), String> {
    match activities(delimited(cell, '(', ')')?)?.as_slice() {
        [a, b] => Ok((a.clone(), b.clone())),
        _ => Err(format!("witness {cell:?} is not a pair")),
    }
}

fn parse_set(cell: &str) -> Result<BTreeSet<Activity>, String> {
    Ok(activities(delimited(cell, '{', '}')?)?.into_iter().collect())
}

/// Reads a text report back.
pub fn parse_report(text: &str) -> Result<Vec<ClassificationVerdict>, ParseError> {
    let mut r = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .flexible(true)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = r
        .headers()
        .map_err(|e| ParseError::new(FORMAT, Location::Row(1), e.to_string()))?;
    if headers.iter().ne(HEADER) {
        return Err(ParseError::new(FORMAT, Location::Row(1), "unexpected header"));
    }
    let mut out = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let row = n + 2;
        let at = |m: String| ParseError::new(FORMAT, Location::Row(row), m);
        let rec = rec.map_err(|e| at(e.to_string()))?;
        let cells: Vec<&str> = rec.iter().collect();
        let verdict = match cells.as_slice() {
            [id, "positive", "+"] => ClassificationVerdict::positive(*id),
            [id, "negative", reason, witness, required, forbidden] => {
                let reason = Reason::from_code(reason)
                    .filter(|r| *r != Reason::Positive)
                    .ok_or_else(|| at(format!("unknown reason {reason:?}")))?;
                let spec = FilterSpec::new(parse_set(required).map_err(at)?, parse_set(forbidden).map_err(at)?)
                    .map_err(|e| at(e.to_string()))?;
                ClassificationVerdict {
                    id: id.to_string(),
                    label: Label::Negative,
                    reason,
                    witness: Some(Witness {
                        pair: parse_pair(witness).map_err(at)?,
                        spec,
                    }),
                }
            }
            _ => return Err(at("malformed row".into())),
        };
        out.push(verdict);
    }
    Ok(out)
}

pub fn parse_report_json(text: &str) -> Result<Vec<ClassificationVerdict>, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::new(FORMAT, Location::Line(e.line()), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Violation;
    use crate::skeleton::Relation;

    fn a(n: &str) -> Activity {
        Activity::new(n).unwrap()
    }

    fn worked_negative() -> ClassificationVerdict {
        ClassificationVerdict::negative(
            "t",
            Violation {
                relation: Relation::Equivalence,
                pair: (a("a3"), a("a5")),
                spec: FilterSpec::new(BTreeSet::new(), [a("a2")].into_iter().collect()).unwrap(),
            },
        )
    }

    #[test]
    fn negative_row() {
        let text = write_report(&[ClassificationVerdict::positive("p"), worked_negative()]);
        assert_eq!(
            text,
            "id\tlabel\treason\twitness\trequired\tforbidden\np\tpositive\t+\nt\tnegative\teq\t(a3,a5)\t{}\t{a2}\n"
        );
        assert_eq!(parse_report(&text).unwrap(), [ClassificationVerdict::positive("p"), worked_negative()]);
    }

    #[test]
    fn awkward_names_survive() {
        let v = ClassificationVerdict::negative(
            "id\twith tab",
            Violation {
                relation: Relation::DirectlyFollows,
                pair: (Activity::Start, a("x,\"y\"")),
                spec: FilterSpec::new([a("{z}")].into_iter().collect(), BTreeSet::new()).unwrap(),
            },
        );
        let text = write_report(std::slice::from_ref(&v));
        assert_eq!(parse_report(&text).unwrap(), std::slice::from_ref(&v));
        assert_eq!(parse_report_json(&write_report_json(std::slice::from_ref(&v))).unwrap(), [v]);
    }

    #[test]
    fn json_shape() {
        let json = write_report_json(&[worked_negative()]);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value[0]["reason"], "eq");
        assert_eq!(value[0]["label"], "negative");
        assert_eq!(value[0]["witness"]["pair"], serde_json::json!(["a3", "a5"]));
        assert_eq!(value[0]["witness"]["forbidden"], serde_json::json!(["a2"]));
    }

    #[test]
    fn bad_rows() {
        assert!(parse_report("nope\n").is_err());
        let head = "id\tlabel\treason\twitness\trequired\tforbidden\n";
        assert!(parse_report(&format!("{head}x\tnegative\tnt\t(a,b)\t{{}}\t{{}}\n")).is_err());
        assert!(parse_report(&format!("{head}x\tnegative\teq\t(a)\t{{}}\t{{}}\n")).is_err());
        assert!(parse_report(&format!("{head}x\tmaybe\t+\n")).is_err());
    }
}
