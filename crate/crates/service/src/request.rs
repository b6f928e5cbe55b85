//! Request models shared by the HTTP handlers and the command line.

use std::collections::BTreeSet;

use log_skeleton::ingestion::{self, parse_activity_list, LogFormat};
use log_skeleton::render::{parse_relations, DocumentFormat, ViewConfig};
use log_skeleton::{ActivityTrace, ClassifierConfig, FilterSpec, LabeledTrace};
use serde::Deserialize;

use crate::error::ApiError;

/// Query of `GET /logs/{id}/skeleton`. Lists are comma separated and use
/// the trace-lines quoting rules for names containing commas.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonQuery {
    pub required: Option<String>,
    pub forbidden: Option<String>,
    /// Absent means the default view; empty means no relations.
    pub relations: Option<String>,
    /// Absent means every activity.
    pub activities: Option<String>,
    pub hyper: Option<String>,
    /// `json` (default), `dot` or `skeleton`.
    pub format: Option<String>,
}

/// A validated skeleton query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonRequest {
    pub spec: FilterSpec,
    pub view: ViewConfig,
    pub format: DocumentFormat,
}

fn list(param: &str, value: &Option<String>) -> Result<BTreeSet<log_skeleton::Activity>, ApiError> {
    match value {
        None => Ok(BTreeSet::new()),
        Some(v) => parse_activity_list(v).map_err(|e| ApiError::bad_request(format!("{param}: {e}"))),
    }
}

impl SkeletonQuery {
    pub fn resolve(&self) -> Result<SkeletonRequest, ApiError> {
        let spec = FilterSpec::new(list("required", &self.required)?, list("forbidden", &self.forbidden)?)?;
        let mut view = ViewConfig::default();
        if let Some(r) = &self.relations {
            view.relations = parse_relations(r)?;
        }
        if self.activities.is_some() {
            view.activities = Some(list("activities", &self.activities)?);
        }
        view.hyper_arcs = match self.hyper.as_deref() {
            None | Some("false") | Some("0") => false,
            Some("") | Some("true") | Some("1") => true,
            Some(other) => return Err(ApiError::bad_request(format!("hyper: expected true or false, got {other:?}"))),
        };
        let format = match &self.format {
            None => DocumentFormat::default(),
            Some(f) => f.parse()?,
        };
        Ok(SkeletonRequest { spec, view, format })
    }
}

/// Body of `POST /logs/{id}/classify`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyRequest {
    pub traces: TestTraces,
    /// Format of `traces` when given as log text. Defaults to trace-lines.
    #[serde(default)]
    pub format: Option<LogFormat>,
    #[serde(default)]
    pub config: ClassifierConfig,
    #[serde(default)]
    pub report: ReportFormat,
}

/// Test traces, either as the text of a log file or as a list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TestTraces {
    Text(String),
    List(Vec<TestTrace>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestTrace {
    /// Defaults to the 1-based position in the list.
    pub id: Option<String>,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Tsv,
}

impl TestTraces {
    pub fn into_labeled(self, format: Option<LogFormat>) -> Result<Vec<LabeledTrace>, ApiError> {
        match self {
            TestTraces::Text(text) => {
                let parsed = ingestion::parse(text.as_bytes(), format.unwrap_or(LogFormat::TraceLines))?;
                Ok(parsed.into_labeled())
            }
            TestTraces::List(items) => items
                .into_iter()
                .enumerate()
                .map(|(i, t)| {
                    let trace = ActivityTrace::from_names(&t.trace)?;
                    Ok(LabeledTrace::new(t.id.unwrap_or_else(|| (i + 1).to_string()), trace))
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use log_skeleton::Relation;

    #[test]
    fn defaults() {
        let r = SkeletonQuery::default().resolve().unwrap();
        assert_eq!(r.spec, FilterSpec::none());
        assert_eq!(r.view, ViewConfig::default());
        assert_eq!(r.format, DocumentFormat::Json);
    }

    #[test]
    fn relations_and_hyper() {
        let q = SkeletonQuery {
            relations: Some("df,never_together".into()),
            hyper: Some(String::new()),
            ..Default::default()
        };
        let r = q.resolve().unwrap();
        assert_eq!(
            r.view.relations,
            [Relation::DirectlyFollows, Relation::NeverTogether].into_iter().collect()
        );
        assert!(r.view.hyper_arcs);
        let none = SkeletonQuery {
            relations: Some(String::new()),
            ..Default::default()
        };
        assert!(none.resolve().unwrap().view.relations.is_empty());
    }

    #[test]
    fn rejects_bad_values() {
        for q in [
            SkeletonQuery {
                hyper: Some("yes".into()),
                ..Default::default()
            },
            SkeletonQuery {
                relations: Some("sometimes".into()),
                ..Default::default()
            },
            SkeletonQuery {
                required: Some("a".into()),
                forbidden: Some("a".into()),
                ..Default::default()
            },
            SkeletonQuery {
                format: Some("svg".into()),
                ..Default::default()
            },
        ] {
            assert_eq!(q.resolve().unwrap_err().status().as_u16(), 400, "{q:?}");
        }
    }

    #[test]
    fn trace_lists_are_numbered() {
        let body: ClassifyRequest = serde_json::from_str(r#"{"traces": [{"trace": ["a"]}, {"id": "x", "trace": []}]}"#).unwrap();
        let tests = body.traces.into_labeled(None).unwrap();
        assert_eq!(tests[0].id, "1");
        assert_eq!(tests[1].id, "x");
        assert!(tests[1].trace.is_empty());
    }
}
