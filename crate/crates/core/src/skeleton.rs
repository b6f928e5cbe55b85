//! The log skeleton: five relations and four counters computed over the
//! extended log.
//!
//! For an activity log `L` over alphabet `A`, every relation ranges over
//! `A ∪ {|>, []}` and is evaluated on the extended traces:
//!
//! * equivalence: `a` and `b` occur equally often in every trace;
//! * always-after `(a, b)`: every trace containing `a` has an occurrence of
//!   `b` after the last occurrence of `a`;
//! * always-before `(a, b)`: every trace containing `a` has an occurrence of
//!   `b` before the first occurrence of `a`;
//! * never-together `{a, b}`: no trace contains both;
//! * directly-follows `(a, b)`: some trace has `b` immediately after `a`.
//!
//! The counters give the directly-follows frequency of every pair and the
//! total, minimal and maximal number of occurrences of every activity.
//! Always-after, always-before and never-together exclude reflexive pairs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::{BitMatrix, BitSet};
use crate::error::{Error, Result};
use crate::log_model::{Activity, ActivityLog, ActivityTrace};

/// The relations of a log skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equivalence,
    AlwaysAfter,
    AlwaysBefore,
    NeverTogether,
    DirectlyFollows,
}

impl Relation {
    pub const ALL: [Relation; 5] = [
        Relation::Equivalence,
        Relation::AlwaysAfter,
        Relation::AlwaysBefore,
        Relation::NeverTogether,
        Relation::DirectlyFollows,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Equivalence => "equivalence",
            Relation::AlwaysAfter => "always_after",
            Relation::AlwaysBefore => "always_before",
            Relation::NeverTogether => "never_together",
            Relation::DirectlyFollows => "directly_follows",
        }
    }

    /// Short code, as used in classification reports.
    pub fn code(self) -> &'static str {
        match self {
            Relation::Equivalence => "eq",
            Relation::AlwaysAfter => "aa",
            Relation::AlwaysBefore => "ab",
            Relation::NeverTogether => "nt",
            Relation::DirectlyFollows => "df",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s || r.code() == s || r.name().replace('_', "-") == s)
            .ok_or_else(|| Error::invalid(format!("unknown relation {s:?}")))
    }
}

/// The extended alphabet of a log in activity order, with a reverse lookup.
/// Index 0 is always `|>` and the last index is always `[]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityIndex {
    activities: Vec<Activity>,
    positions: HashMap<Activity, usize>,
}

impl ActivityIndex {
    pub fn for_alphabet(alphabet: &BTreeSet<Activity>) -> Self {
        let activities: Vec<Activity> = std::iter::once(Activity::Start)
            .chain(alphabet.iter().filter(|a| !a.is_artificial()).cloned())
            .chain(std::iter::once(Activity::End))
            .collect();
        let positions = activities.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        ActivityIndex { activities, positions }
    }

    pub fn len(&self) -> usize {
        self.activities.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn activities(&self) -> &[Activity] {
        &self.activities
    }

    pub fn activity(&self, i: usize) -> &Activity {
        &self.activities[i]
    }

    pub fn position(&self, activity: &Activity) -> Option<usize> {
        self.positions.get(activity).copied()
    }

    /// Index sequence of the extended trace. Fails on unknown activities.
    pub fn encode(&self, trace: &ActivityTrace) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(trace.len() + 2);
        out.push(0);
        for a in trace {
            match self.positions.get(a) {
                Some(&i) if !a.is_artificial() => out.push(i),
                _ => return Err(Error::invalid(format!("activity {a} is not in the alphabet"))),
            }
        }
        out.push(self.activities.len() - 1);
        Ok(out)
    }
}

/// Accumulates extended traces one at a time into a skeleton.
pub(crate) struct SkeletonBuilder {
    index: Arc<ActivityIndex>,
    n: usize,
    class_of: Vec<usize>,
    always_after: BitMatrix,
    always_before: BitMatrix,
    never_together: BitMatrix,
    df_count: Vec<usize>,
    sum: Vec<usize>,
    min: Vec<usize>,
    max: Vec<usize>,
    trace_count: usize,
    counts: Vec<usize>,
    first: Vec<usize>,
    last: Vec<usize>,
    refine: HashMap<(usize, usize), usize>,
}

impl SkeletonBuilder {
    pub fn new(index: Arc<ActivityIndex>) -> Self {
        let n = index.len();
        SkeletonBuilder {
            index,
            n,
            class_of: vec![0; n],
            always_after: BitMatrix::full_irreflexive(n),
            always_before: BitMatrix::full_irreflexive(n),
            never_together: BitMatrix::full_irreflexive(n),
            df_count: vec![0; n * n],
            sum: vec![0; n],
            min: vec![0; n],
            max: vec![0; n],
            trace_count: 0,
            counts: vec![0; n],
            first: vec![0; n],
            last: vec![0; n],
            refine: HashMap::new(),
        }
    }

    /// Adds `multiplicity` copies of an encoded extended trace.
    pub fn add(&mut self, ext: &[usize], multiplicity: usize) {
        if multiplicity == 0 {
            return;
        }
        let n = self.n;
        self.counts.iter_mut().for_each(|c| *c = 0);
        for (pos, &a) in ext.iter().enumerate() {
            if self.counts[a] == 0 {
                self.first[a] = pos;
            }
            self.counts[a] += 1;
            self.last[a] = pos;
        }
        for w in ext.windows(2) {
            self.df_count[w[0] * n + w[1]] += multiplicity;
        }
        for a in 0..n {
            let c = self.counts[a];
            self.sum[a] += c * multiplicity;
            if self.trace_count == 0 {
                self.min[a] = c;
                self.max[a] = c;
            } else {
                self.min[a] = self.min[a].min(c);
                self.max[a] = self.max[a].max(c);
            }
        }

        // Equivalence: refine the partition by this trace's count vector.
        self.refine.clear();
        for a in 0..n {
            let next = self.refine.len();
            self.class_of[a] = *self.refine.entry((self.class_of[a], self.counts[a])).or_insert(next);
        }

        let mut present: Vec<usize> = (0..n).filter(|&a| self.counts[a] > 0).collect();
        let mut absent = BitSet::full(n);
        let mut presence = BitSet::new(n);
        for &a in &present {
            presence.insert(a);
        }
        absent.remove_all(&presence);
        for &a in &present {
            self.never_together.and_row(a, absent.words());
        }

        // Always-after: the activities whose last occurrence is later.
        present.sort_unstable_by_key(|&a| std::cmp::Reverse(self.last[a]));
        let mut later = BitSet::new(n);
        for &a in &present {
            self.always_after.and_row(a, later.words());
            later.insert(a);
        }
        // Always-before: the activities whose first occurrence is earlier.
        present.sort_unstable_by_key(|&a| self.first[a]);
        let mut earlier = BitSet::new(n);
        for &a in &present {
            self.always_before.and_row(a, earlier.words());
            earlier.insert(a);
        }

        self.trace_count += multiplicity;
    }

    pub fn finish(self) -> LogSkeleton {
        let n = self.n;
        // Canonical class numbering: classes ranked by their smallest member.
        let mut rank: HashMap<usize, usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![0; n];
        for (a, slot) in class_of.iter_mut().enumerate() {
            let next = rank.len();
            let k = *rank.entry(self.class_of[a]).or_insert(next);
            if k == classes.len() {
                classes.push(Vec::new());
            }
            classes[k].push(a);
            *slot = k;
        }
        LogSkeleton {
            index: self.index,
            class_of,
            classes,
            always_after: self.always_after,
            always_before: self.always_before,
            never_together: self.never_together,
            df_count: self.df_count,
            sum: self.sum,
            min: self.min,
            max: self.max,
            trace_count: self.trace_count,
        }
    }
}

/// The log skeleton of an activity log. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogSkeleton {
    index: Arc<ActivityIndex>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    always_after: BitMatrix,
    always_before: BitMatrix,
    never_together: BitMatrix,
    df_count: Vec<usize>,
    sum: Vec<usize>,
    min: Vec<usize>,
    max: Vec<usize>,
    trace_count: usize,
}

impl LogSkeleton {
    /// Builds the skeleton of `log`, extending it internally.
    pub fn build(log: &ActivityLog) -> LogSkeleton {
        let index = Arc::new(ActivityIndex::for_alphabet(log.alphabet()));
        let mut builder = SkeletonBuilder::new(index.clone());
        for (trace, n) in log.iter() {
            let ext = index.encode(trace).expect("log traces are over the log alphabet");
            builder.add(&ext, n);
        }
        builder.finish()
    }

    pub fn index(&self) -> &ActivityIndex {
        &self.index
    }

    /// The extended alphabet, in activity order.
    pub fn activities(&self) -> &[Activity] {
        self.index.activities()
    }

    /// Number of traces in the log, |L|.
    pub fn trace_count(&self) -> usize {
        self.trace_count
    }

    fn pos(&self, a: &Activity) -> Result<usize> {
        self.index
            .position(a)
            .ok_or_else(|| Error::invalid(format!("activity {a} is not in the skeleton alphabet")))
    }

    fn pair(&self, a: &Activity, b: &Activity) -> Result<(usize, usize)> {
        Ok((self.pos(a)?, self.pos(b)?))
    }

    pub fn are_equivalent(&self, a: &Activity, b: &Activity) -> Result<bool> {
        let (i, j) = self.pair(a, b)?;
        Ok(self.class_of[i] == self.class_of[j])
    }

    /// Whether after any occurrence of `a` there is always an occurrence of `b`.
    pub fn always_after(&self, a: &Activity, b: &Activity) -> Result<bool> {
        let (i, j) = self.pair(a, b)?;
        Ok(self.always_after.get(i, j))
    }

    /// Whether before any occurrence of `a` there is always an occurrence of `b`.
    pub fn always_before(&self, a: &Activity, b: &Activity) -> Result<bool> {
        let (i, j) = self.pair(a, b)?;
        Ok(self.always_before.get(i, j))
    }

    pub fn never_together(&self, a: &Activity, b: &Activity) -> Result<bool> {
        let (i, j) = self.pair(a, b)?;
        Ok(self.never_together.get(i, j))
    }

    pub fn directly_follows(&self, a: &Activity, b: &Activity) -> Result<bool> {
        Ok(self.df_count(a, b)? > 0)
    }

    pub fn holds(&self, relation: Relation, a: &Activity, b: &Activity) -> Result<bool> {
        match relation {
            Relation::Equivalence => self.are_equivalent(a, b),
            Relation::AlwaysAfter => self.always_after(a, b),
            Relation::AlwaysBefore => self.always_before(a, b),
            Relation::NeverTogether => self.never_together(a, b),
            Relation::DirectlyFollows => self.directly_follows(a, b),
        }
    }

    pub fn df_count(&self, a: &Activity, b: &Activity) -> Result<usize> {
        let (i, j) = self.pair(a, b)?;
        Ok(self.df_at(i, j))
    }

    pub fn sum_count(&self, a: &Activity) -> Result<usize> {
        Ok(self.sum[self.pos(a)?])
    }

    pub fn min_count(&self, a: &Activity) -> Result<usize> {
        Ok(self.min[self.pos(a)?])
    }

    pub fn max_count(&self, a: &Activity) -> Result<usize> {
        Ok(self.max[self.pos(a)?])
    }

    /// The smallest activity equivalent to `a`.
    pub fn representative(&self, a: &Activity) -> Result<&Activity> {
        let i = self.pos(a)?;
        Ok(self.index.activity(self.classes[self.class_of[i]][0]))
    }

    /// Rank of `a`'s equivalence class, classes ordered by representative.
    pub fn class_rank(&self, a: &Activity) -> Result<usize> {
        Ok(self.class_of[self.pos(a)?])
    }

    /// Equivalence classes, ordered by representative; members ascending.
    pub fn equivalence_classes(&self) -> Vec<Vec<&Activity>> {
        self.classes
            .iter()
            .map(|c| c.iter().map(|&i| self.index.activity(i)).collect())
            .collect()
    }

    /// The pairs of a relation in row-major activity order. Equivalence
    /// includes reflexive pairs; never-together lists each unordered pair
    /// once, smaller activity first.
    pub fn pairs(&self, relation: Relation) -> Vec<(Activity, Activity)> {
        let n = self.index.len();
        let act = |i: usize| self.index.activity(i).clone();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let keep = match relation {
                    Relation::Equivalence => self.class_of[i] == self.class_of[j],
                    Relation::AlwaysAfter => self.always_after.get(i, j),
                    Relation::AlwaysBefore => self.always_before.get(i, j),
                    Relation::NeverTogether => i < j && self.never_together.get(i, j),
                    Relation::DirectlyFollows => self.df_at(i, j) > 0,
                };
                if keep {
                    out.push((act(i), act(j)));
                }
            }
        }
        out
    }

    pub(crate) fn df_at(&self, i: usize, j: usize) -> usize {
        self.df_count[i * self.index.len() + j]
    }

    pub(crate) fn class_index(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub(crate) fn class_members(&self, k: usize) -> &[usize] {
        &self.classes[k]
    }

    pub(crate) fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub(crate) fn always_after_matrix(&self) -> &BitMatrix {
        &self.always_after
    }

    pub(crate) fn always_before_matrix(&self) -> &BitMatrix {
        &self.always_before
    }

    pub(crate) fn never_together_matrix(&self) -> &BitMatrix {
        &self.never_together
    }

    pub(crate) fn sum_at(&self, i: usize) -> usize {
        self.sum[i]
    }

    pub(crate) fn min_at(&self, i: usize) -> usize {
        self.min[i]
    }

    pub(crate) fn max_at(&self, i: usize) -> usize {
        self.max[i]
    }

    /// Canonical JSON document: fixed key order, activities listed in
    /// activity order, counts as integers.
    pub fn to_json(&self) -> String {
        let label = |i: usize| self.index.activity(i).label().to_string();
        let n = self.index.len();
        let doc = SkeletonDocument {
            trace_count: self.trace_count,
            activities: (0..n)
                .map(|i| ActivityEntry {
                    activity: label(i),
                    class: self.class_of[i],
                    representative: label(self.classes[self.class_of[i]][0]),
                    sum: self.sum[i],
                    min: self.min[i],
                    max: self.max[i],
                })
                .collect(),
            equivalence: self
                .classes
                .iter()
                .map(|c| c.iter().map(|&i| label(i)).collect())
                .collect(),
            always_after: self.always_after.pairs().map(|(i, j)| (label(i), label(j))).collect(),
            always_before: self.always_before.pairs().map(|(i, j)| (label(i), label(j))).collect(),
            never_together: self
                .never_together
                .pairs()
                .filter(|(i, j)| i < j)
                .map(|(i, j)| (label(i), label(j)))
                .collect(),
            directly_follows: (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| self.df_at(i, j) > 0)
                .map(|(i, j)| (label(i), label(j), self.df_at(i, j)))
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("skeleton document serializes");
        text.push('\n');
        text
    }
}

#[derive(Serialize)]
struct SkeletonDocument {
    trace_count: usize,
    activities: Vec<ActivityEntry>,
    equivalence: Vec<Vec<String>>,
    always_after: Vec<(String, String)>,
    always_before: Vec<(String, String)>,
    never_together: Vec<(String, String)>,
    directly_follows: Vec<(String, String, usize)>,
}

#[derive(Serialize)]
struct ActivityEntry {
    activity: String,
    class: usize,
    representative: String,
    sum: usize,
    min: usize,
    max: usize,
}
