//! Activities, traces, activity logs and the operations on them: projection,
//! extension with artificial start/end activities, subtrace counting and
//! required/forbidden filtering.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bag::Bag;
use crate::error::{Error, Result};

/// Label of the artificial start activity.
pub const START_LABEL: &str = "|>";
/// Label of the artificial end activity.
pub const END_LABEL: &str = "[]";

/// An activity.
///
/// Activities are totally ordered: the artificial start activity comes
/// first, regular activities follow in lexicographic (byte-wise) order of
/// their names, and the artificial end activity comes last. This order picks
/// equivalence-class representatives and drives every deterministic
/// enumeration in the crate.
///
/// The labels `|>` and `[]` are reserved for the artificial activities, so
/// every activity is identified by its label alone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Activity {
    Start,
    Regular(Arc<str>),
    End,
}

impl Activity {
    /// Creates a regular activity. The name must be non-empty, must not
    /// contain line breaks, and must not be one of the reserved labels.
    pub fn new(name: &str) -> Result<Self> {
        if name.is_empty() {
            return Err(Error::invalid("activity name is empty"));
        }
        if name == START_LABEL || name == END_LABEL {
            return Err(Error::invalid(format!(
                "activity name {name:?} is reserved for an artificial activity"
            )));
        }
        if name.contains(['\n', '\r']) {
            return Err(Error::invalid(format!("activity name {name:?} contains a line break")));
        }
        Ok(Activity::Regular(Arc::from(name)))
    }

    /// Parses a label, mapping the reserved labels to the artificial activities.
    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            START_LABEL => Ok(Activity::Start),
            END_LABEL => Ok(Activity::End),
            other => Activity::new(other),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Activity::Start => START_LABEL,
            Activity::End => END_LABEL,
            Activity::Regular(name) => name,
        }
    }

    pub fn is_artificial(&self) -> bool {
        !matches!(self, Activity::Regular(_))
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Activity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Activity::from_label(s)
    }
}

impl Serialize for Activity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Activity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Activity::from_label(&s).map_err(serde::de::Error::custom)
    }
}

/// Builds a set of regular activities from names.
pub fn activity_set<I, S>(names: I) -> Result<BTreeSet<Activity>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    names.into_iter().map(|n| Activity::new(n.as_ref())).collect()
}

/// A finite sequence of activities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivityTrace(Vec<Activity>);

impl ActivityTrace {
    pub fn new(elements: Vec<Activity>) -> Self {
        ActivityTrace(elements)
    }

    pub fn empty() -> Self {
        ActivityTrace(Vec::new())
    }

    /// Builds a trace of regular activities from names.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        names
            .into_iter()
            .map(|n| Activity::new(n.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(ActivityTrace)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn elements(&self) -> &[Activity] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Activity> {
        self.0.iter()
    }

    pub fn contains(&self, activity: &Activity) -> bool {
        self.0.contains(activity)
    }

    /// The set of activities occurring in the trace.
    pub fn activities(&self) -> BTreeSet<Activity> {
        self.0.iter().cloned().collect()
    }

    /// The subsequence of elements contained in `keep`, order preserved.
    pub fn project(&self, keep: &BTreeSet<Activity>) -> ActivityTrace {
        ActivityTrace(self.0.iter().filter(|a| keep.contains(*a)).cloned().collect())
    }

    /// First and last element of a non-empty trace.
    pub fn first_last(&self) -> Result<(&Activity, &Activity)> {
        first_last(&self.0)
    }

    /// Number of (possibly overlapping) positions at which `pattern` occurs
    /// contiguously in the trace.
    pub fn occurrences(&self, pattern: &[Activity]) -> Result<usize> {
        occurrence_count(&self.0, pattern)
    }

    /// Wraps the trace with the artificial start and end activities.
    pub fn extend(&self) -> ExtendedTrace {
        let mut elements = Vec::with_capacity(self.0.len() + 2);
        elements.push(Activity::Start);
        elements.extend(self.0.iter().cloned());
        elements.push(Activity::End);
        ExtendedTrace(elements)
    }
}

impl fmt::Display for ActivityTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(a.label())?;
        }
        f.write_str(">")
    }
}

impl FromIterator<Activity> for ActivityTrace {
    fn from_iter<I: IntoIterator<Item = Activity>>(iter: I) -> Self {
        ActivityTrace(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a ActivityTrace {
    type Item = &'a Activity;
    type IntoIter = std::slice::Iter<'a, Activity>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Number of (possibly overlapping) contiguous occurrences of `pattern` in
/// `trace`. The pattern must be non-empty.
pub fn occurrence_count(trace: &[Activity], pattern: &[Activity]) -> Result<usize> {
    if pattern.is_empty() {
        return Err(Error::invalid("occurrence pattern is empty"));
    }
    Ok(trace.windows(pattern.len()).filter(|w| *w == pattern).count())
}

/// First and last element of a non-empty sequence.
pub fn first_last(trace: &[Activity]) -> Result<(&Activity, &Activity)> {
    match (trace.first(), trace.last()) {
        (Some(first), Some(last)) => Ok((first, last)),
        _ => Err(Error::invalid("first/last of an empty trace")),
    }
}

/// A trace wrapped by the artificial start and end activities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtendedTrace(Vec<Activity>);

impl ExtendedTrace {
    pub fn elements(&self) -> &[Activity] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_last(&self) -> (&Activity, &Activity) {
        (&self.0[0], &self.0[self.0.len() - 1])
    }

    /// The original trace, without the artificial activities.
    pub fn strip(&self) -> ActivityTrace {
        ActivityTrace(self.0[1..self.0.len() - 1].to_vec())
    }
}

/// A bag of activity traces over a finite alphabet of regular activities.
///
/// The alphabet contains every activity occurring in a trace and may contain
/// more. Filtering keeps the alphabet unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActivityLog {
    alphabet: BTreeSet<Activity>,
    traces: Bag<ActivityTrace>,
}

impl ActivityLog {
    /// Creates a log with a declared alphabet. Fails if the alphabet holds
    /// an artificial activity or a trace uses an activity outside it.
    pub fn new(alphabet: BTreeSet<Activity>, traces: Bag<ActivityTrace>) -> Result<Self> {
        if let Some(a) = alphabet.iter().find(|a| a.is_artificial()) {
            return Err(Error::invalid(format!("alphabet contains artificial activity {a}")));
        }
        for (trace, _) in traces.iter() {
            if let Some(a) = trace.iter().find(|a| !alphabet.contains(*a)) {
                return Err(Error::invalid(format!(
                    "trace {trace} uses activity {a} outside the alphabet"
                )));
            }
        }
        Ok(ActivityLog { alphabet, traces })
    }

    /// Creates a log whose alphabet is the set of activities occurring in it.
    pub fn from_traces<I>(traces: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ActivityTrace, usize)>,
    {
        let traces: Bag<ActivityTrace> = traces.into_iter().collect();
        let alphabet = traces.iter().flat_map(|(t, _)| t.iter().cloned()).collect();
        ActivityLog::new(alphabet, traces)
    }

    pub fn empty(alphabet: BTreeSet<Activity>) -> Result<Self> {
        ActivityLog::new(alphabet, Bag::new())
    }

    pub fn alphabet(&self) -> &BTreeSet<Activity> {
        &self.alphabet
    }

    pub fn traces(&self) -> &Bag<ActivityTrace> {
        &self.traces
    }

    /// Total number of traces, |L|.
    pub fn len(&self) -> usize {
        self.traces.total()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn distinct_traces(&self) -> usize {
        self.traces.distinct()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ActivityTrace, usize)> + '_ {
        self.traces.iter()
    }

    /// The log containing only `trace`, over this log's alphabet.
    pub fn singleton(&self, trace: &ActivityTrace) -> Result<ActivityLog> {
        ActivityLog::new(self.alphabet.clone(), [(trace.clone(), 1)].into_iter().collect())
    }

    /// Projects every trace on `keep`; the alphabet becomes alphabet ∩ keep.
    pub fn project(&self, keep: &BTreeSet<Activity>) -> ActivityLog {
        ActivityLog {
            alphabet: self.alphabet.intersection(keep).cloned().collect(),
            traces: self.traces.iter().map(|(t, n)| (t.project(keep), n)).collect(),
        }
    }

    /// The sub-log of traces containing every required activity and no
    /// forbidden one. The alphabet is kept.
    pub fn filter(&self, spec: &FilterSpec) -> Result<ActivityLog> {
        if let Some(a) = spec.activities().find(|a| !self.alphabet.contains(*a)) {
            return Err(Error::invalid(format!("filter activity {a} is not in the alphabet")));
        }
        Ok(ActivityLog {
            alphabet: self.alphabet.clone(),
            traces: self
                .traces
                .iter()
                .filter(|(t, _)| spec.admits(t))
                .map(|(t, n)| (t.clone(), n))
                .collect(),
        })
    }

    /// Wraps every trace with the artificial start and end activities.
    pub fn extend(&self) -> Result<ExtendedLog> {
        if let Some(a) = self.alphabet.iter().find(|a| a.is_artificial()) {
            return Err(Error::invalid(format!("alphabet already contains {a}")));
        }
        let mut alphabet = self.alphabet.clone();
        alphabet.insert(Activity::Start);
        alphabet.insert(Activity::End);
        Ok(ExtendedLog {
            alphabet,
            traces: self.traces.iter().map(|(t, n)| (t.extend(), n)).collect(),
        })
    }
}

/// An activity log whose traces all start with `|>` and end with `[]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedLog {
    alphabet: BTreeSet<Activity>,
    traces: Bag<ExtendedTrace>,
}

impl ExtendedLog {
    /// The extended alphabet, including both artificial activities.
    pub fn alphabet(&self) -> &BTreeSet<Activity> {
        &self.alphabet
    }

    pub fn traces(&self) -> &Bag<ExtendedTrace> {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.total()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Removes the artificial activities again.
    pub fn strip(&self) -> ActivityLog {
        ActivityLog {
            alphabet: self.alphabet.iter().filter(|a| !a.is_artificial()).cloned().collect(),
            traces: self.traces.iter().map(|(t, n)| (t.strip(), n)).collect(),
        }
    }
}

/// A trace with an identifier, as read from a test log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledTrace {
    pub id: String,
    pub trace: ActivityTrace,
}

impl LabeledTrace {
    pub fn new(id: impl Into<String>, trace: ActivityTrace) -> Self {
        LabeledTrace { id: id.into(), trace }
    }

    /// Labels traces by their 1-based position.
    pub fn numbered<I: IntoIterator<Item = ActivityTrace>>(traces: I) -> Vec<LabeledTrace> {
        traces
            .into_iter()
            .enumerate()
            .map(|(i, trace)| LabeledTrace::new((i + 1).to_string(), trace))
            .collect()
    }
}

/// A pair of disjoint sets of regular activities: traces must contain every
/// required activity and none of the forbidden ones.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FilterSpec {
    required: BTreeSet<Activity>,
    forbidden: BTreeSet<Activity>,
}

impl FilterSpec {
    pub fn new(required: BTreeSet<Activity>, forbidden: BTreeSet<Activity>) -> Result<Self> {
        if let Some(a) = required.intersection(&forbidden).next() {
            return Err(Error::invalid(format!("activity {a} is both required and forbidden")));
        }
        if let Some(a) = required.iter().chain(&forbidden).find(|a| a.is_artificial()) {
            return Err(Error::invalid(format!("artificial activity {a} cannot be filtered on")));
        }
        Ok(FilterSpec { required, forbidden })
    }

    /// The filter that keeps every trace.
    pub fn none() -> Self {
        FilterSpec::default()
    }

    pub fn required(&self) -> &BTreeSet<Activity> {
        &self.required
    }

    pub fn forbidden(&self) -> &BTreeSet<Activity> {
        &self.forbidden
    }

    /// |required| + |forbidden|.
    pub fn size(&self) -> usize {
        self.required.len() + self.forbidden.len()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    pub fn activities(&self) -> impl Iterator<Item = &Activity> + '_ {
        self.required.iter().chain(&self.forbidden)
    }

    /// Whether `trace` passes the filter.
    pub fn admits(&self, trace: &ActivityTrace) -> bool {
        self.required.iter().all(|a| trace.contains(a))
            && !self.forbidden.iter().any(|a| trace.contains(a))
    }
}
