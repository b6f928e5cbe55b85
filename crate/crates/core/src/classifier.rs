//! Subsumption between logs and traces, and batch classification of test
//! traces against a training log.
//!
//! A log `L` subsumes a log `L'` (same alphabet) when every equivalence,
//! always-after and always-before pair of `L` also holds in `L'`, and every
//! directly-follows pair of `L'` also occurs in `L`. A log subsumes a trace
//! when, for every filter spec up to the configured size, the filtered log
//! subsumes the filtered singleton log of the trace.
//!
//! Checks run in four tiers, strongest evidence first:
//!
//! 1. equivalence, always-after and always-before on the unfiltered log;
//! 2. equivalence under filters of size 1, 2, … up to the bound;
//! 3. always-after and always-before under filters of size 1, 2, …;
//! 4. directly-follows under filters of size 0, 1, 2, …, counted only when
//!    the filtered training log has enough support.
//!
//! Both [`Classifier::subsumes_trace`] and [`Classifier::classify_batch`]
//! walk the tiers in this order, so the reported violation is the first one
//! found in tier order, then filter order, then relation and pair order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::log_model::{Activity, ActivityLog, ActivityTrace, FilterSpec, LabeledTrace};
use crate::skeleton::{ActivityIndex, LogSkeleton, Relation, SkeletonBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    /// Bound on |required| + |forbidden| for the enumerated filters.
    pub max_filter_size: usize,
    /// Minimal filtered training log size for a directly-follows violation
    /// to count.
    pub df_support_min: usize,
    /// Stop labelling traces negative once this many negatives exist at a
    /// tier boundary.
    pub negative_cap: Option<usize>,
    /// Skip filters whose filtered training log is empty.
    pub skip_empty_training: bool,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            max_filter_size: 3,
            df_support_min: 16,
            negative_cap: None,
            skip_empty_training: true,
        }
    }
}

impl ClassifierConfig {
    /// Contest mode: defaults plus a negative cap of 10.
    pub fn pdc() -> Self {
        ClassifierConfig {
            negative_cap: Some(10),
            ..ClassifierConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.df_support_min == 0 {
            return Err(Error::invalid("df_support_min must be at least 1"));
        }
        Ok(())
    }
}

/// A subsumption failure: which relation broke, on which pair, under which
/// filter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub relation: Relation,
    pub pair: (Activity, Activity),
    pub spec: FilterSpec,
}

impl Violation {
    /// The tier whose checks report this violation.
    pub fn tier(&self) -> Tier {
        match (self.relation, self.spec.is_empty()) {
            (Relation::DirectlyFollows, _) => Tier::DirectlyFollows,
            (_, true) => Tier::Unfiltered,
            (Relation::Equivalence, false) => Tier::Equivalence,
            _ => Tier::Always,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsumptionVerdict {
    holds: bool,
    violation: Option<Violation>,
}

impl SubsumptionVerdict {
    fn from_violation(violation: Option<Violation>) -> Self {
        SubsumptionVerdict {
            holds: violation.is_none(),
            violation,
        }
    }

    pub fn holds(&self) -> bool {
        self.holds
    }

    pub fn violation(&self) -> Option<&Violation> {
        self.violation.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

/// Report cell vocabulary: `+` or the violated relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reason {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "eq")]
    Equivalence,
    #[serde(rename = "aa")]
    AlwaysAfter,
    #[serde(rename = "ab")]
    AlwaysBefore,
    #[serde(rename = "df")]
    DirectlyFollows,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::Positive => "+",
            Reason::Equivalence => "eq",
            Reason::AlwaysAfter => "aa",
            Reason::AlwaysBefore => "ab",
            Reason::DirectlyFollows => "df",
        }
    }

    pub fn from_code(code: &str) -> Option<Reason> {
        [
            Reason::Positive,
            Reason::Equivalence,
            Reason::AlwaysAfter,
            Reason::AlwaysBefore,
            Reason::DirectlyFollows,
        ]
        .into_iter()
        .find(|r| r.code() == code)
    }

    fn for_relation(relation: Relation) -> Reason {
        match relation {
            Relation::Equivalence => Reason::Equivalence,
            Relation::AlwaysAfter => Reason::AlwaysAfter,
            Relation::AlwaysBefore => Reason::AlwaysBefore,
            Relation::DirectlyFollows => Reason::DirectlyFollows,
            Relation::NeverTogether => unreachable!("never-together is not part of subsumption"),
        }
    }

    pub fn relation(self) -> Option<Relation> {
        match self {
            Reason::Positive => None,
            Reason::Equivalence => Some(Relation::Equivalence),
            Reason::AlwaysAfter => Some(Relation::AlwaysAfter),
            Reason::AlwaysBefore => Some(Relation::AlwaysBefore),
            Reason::DirectlyFollows => Some(Relation::DirectlyFollows),
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub pair: (Activity, Activity),
    #[serde(flatten)]
    pub spec: FilterSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub id: String,
    pub label: Label,
    pub reason: Reason,
    pub witness: Option<Witness>,
}

impl ClassificationVerdict {
    pub fn positive(id: impl Into<String>) -> Self {
        ClassificationVerdict {
            id: id.into(),
            label: Label::Positive,
            reason: Reason::Positive,
            witness: None,
        }
    }

    pub fn negative(id: impl Into<String>, violation: Violation) -> Self {
        ClassificationVerdict {
            id: id.into(),
            label: Label::Negative,
            reason: Reason::for_relation(violation.relation),
            witness: Some(Witness {
                pair: violation.pair,
                spec: violation.spec,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Unfiltered,
    Equivalence,
    Always,
    DirectlyFollows,
}

impl Tier {
    pub const ORDER: [Tier; 4] = [Tier::Unfiltered, Tier::Equivalence, Tier::Always, Tier::DirectlyFollows];

    fn steps(self, max_filter_size: usize) -> Vec<(usize, &'static [Relation])> {
        const UNFILTERED: &[Relation] = &[Relation::Equivalence, Relation::AlwaysAfter, Relation::AlwaysBefore];
        const EQ: &[Relation] = &[Relation::Equivalence];
        const ALWAYS: &[Relation] = &[Relation::AlwaysAfter, Relation::AlwaysBefore];
        const DF: &[Relation] = &[Relation::DirectlyFollows];
        match self {
            Tier::Unfiltered => vec![(0, UNFILTERED)],
            Tier::Equivalence => (1..=max_filter_size).map(|k| (k, EQ)).collect(),
            Tier::Always => (1..=max_filter_size).map(|k| (k, ALWAYS)).collect(),
            Tier::DirectlyFollows => (0..=max_filter_size).map(|k| (k, DF)).collect(),
        }
    }
}

/// What one tier of a batch run did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TierStats {
    pub tier: Tier,
    /// Traces still unlabelled when the tier started.
    pub traces_checked: usize,
    /// Traces labelled negative by this tier.
    pub negatives: usize,
    /// (trace, filter) combinations compared in this tier.
    pub spec_checks: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchReport {
    pub verdicts: Vec<ClassificationVerdict>,
    /// Traces rejected up front for using activities outside the training
    /// alphabet.
    pub unknown_activity: usize,
    /// Tiers that ran, in order.
    pub tiers: Vec<TierStats>,
    /// The tier after which the negative cap stopped evaluation.
    pub stopped_after: Option<Tier>,
}

/// Every filter spec over `alphabet` with |required| + |forbidden| ≤
/// `max_size`: by ascending size, then support set in activity order, then
/// required-before-forbidden assignments. The empty spec comes first.
pub fn enumerate_filters(alphabet: &BTreeSet<Activity>, max_size: usize) -> impl Iterator<Item = FilterSpec> + '_ {
    let items: Vec<&Activity> = alphabet.iter().filter(|a| !a.is_artificial()).collect();
    (0..=max_size.min(items.len())).flat_map(move |k| {
        assignments(items.clone(), k).map(|(req, fbd)| {
            FilterSpec::new(req.into_iter().cloned().collect(), fbd.into_iter().cloned().collect())
                .expect("enumerated filter sets are disjoint")
        })
    })
}

/// All (required, forbidden) splits of all k-subsets of `items`.
fn assignments<T: Clone>(items: Vec<T>, k: usize) -> impl Iterator<Item = (Vec<T>, Vec<T>)> {
    items.into_iter().combinations(k).flat_map(move |support| {
        (0u64..1 << k).map(move |mask| {
            let mut req = Vec::new();
            let mut fbd = Vec::new();
            for (i, item) in support.iter().enumerate() {
                if mask & (1 << (k - 1 - i)) != 0 {
                    fbd.push(item.clone());
                } else {
                    req.push(item.clone());
                }
            }
            (req, fbd)
        })
    })
}

/// Whether `subsuming` subsumes `subsumed`. Both logs must have the same
/// alphabet.
pub fn subsumes_log(subsuming: &ActivityLog, subsumed: &ActivityLog) -> Result<SubsumptionVerdict> {
    if subsuming.alphabet() != subsumed.alphabet() {
        return Err(Error::invalid("subsumption requires logs over the same alphabet"));
    }
    let big = LogSkeleton::build(subsuming);
    let small = LogSkeleton::build(subsumed);
    let violation = [
        Relation::Equivalence,
        Relation::AlwaysAfter,
        Relation::AlwaysBefore,
        Relation::DirectlyFollows,
    ]
    .into_iter()
    .find_map(|r| {
        first_violation(r, &big, &small).map(|(i, j)| Violation {
            relation: r,
            pair: (big.index().activity(i).clone(), big.index().activity(j).clone()),
            spec: FilterSpec::none(),
        })
    });
    Ok(SubsumptionVerdict::from_violation(violation))
}

/// First pair of `relation` breaking subsumption of `small` by `big`, as
/// activity indices.
///
/// For equivalence the witness is class based: for the first class of `big`
/// (by representative) that `small` splits, the pair is the representative
/// and the greatest member no longer equivalent to it.
fn first_violation(relation: Relation, big: &LogSkeleton, small: &LogSkeleton) -> Option<(usize, usize)> {
    match relation {
        Relation::Equivalence => (0..big.class_count()).find_map(|k| {
            let members = big.class_members(k);
            let rep = members[0];
            let rep_class = small.class_index(rep);
            members
                .iter()
                .rev()
                .find(|&&m| small.class_index(m) != rep_class)
                .map(|&m| (rep, m))
        }),
        Relation::AlwaysAfter => big.always_after_matrix().first_missing_from(small.always_after_matrix()),
        Relation::AlwaysBefore => big.always_before_matrix().first_missing_from(small.always_before_matrix()),
        Relation::DirectlyFollows => {
            let n = big.index().len();
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .find(|&(i, j)| small.df_at(i, j) > 0 && big.df_at(i, j) == 0)
        }
        Relation::NeverTogether => None,
    }
}

/// Whether `log` subsumes `trace` under `config`.
pub fn subsumes_trace(log: &ActivityLog, trace: &ActivityTrace, config: &ClassifierConfig) -> Result<SubsumptionVerdict> {
    Classifier::new(log, config.clone())?.subsumes_trace(trace)
}

/// Classifies every test trace against `training`; verdicts follow input
/// order.
pub fn classify_batch(
    training: &ActivityLog,
    tests: &[LabeledTrace],
    config: &ClassifierConfig,
) -> Result<Vec<ClassificationVerdict>> {
    Ok(Classifier::new(training, config.clone())?.classify_batch(tests).verdicts)
}

struct EncodedTrace {
    ext: Vec<usize>,
    count: usize,
    presence: BitSet,
}

struct Filtered {
    skeleton: LogSkeleton,
    support: usize,
}

struct Prepared {
    skeleton: LogSkeleton,
    presence: BitSet,
}

#[derive(Clone)]
struct IndexSpec {
    required: Vec<usize>,
    forbidden: Vec<usize>,
}

impl IndexSpec {
    fn admits(&self, presence: &BitSet) -> bool {
        self.required.iter().all(|&a| presence.contains(a)) && !self.forbidden.iter().any(|&a| presence.contains(a))
    }
}

/// A training log prepared for repeated subsumption checks. Skeletons of
/// filtered sub-logs are memoized by the set of distinct traces they keep.
pub struct Classifier<'a> {
    log: &'a ActivityLog,
    config: ClassifierConfig,
    index: Arc<ActivityIndex>,
    regular: Vec<usize>,
    traces: Vec<EncodedTrace>,
    cache: Mutex<HashMap<BitSet, Arc<Filtered>>>,
    skeleton_builds: AtomicUsize,
}

impl<'a> Classifier<'a> {
    pub fn new(log: &'a ActivityLog, config: ClassifierConfig) -> Result<Self> {
        config.validate()?;
        let index = Arc::new(ActivityIndex::for_alphabet(log.alphabet()));
        let n = index.len();
        let traces = log
            .iter()
            .map(|(t, count)| {
                let ext = index.encode(t).expect("log traces are over the log alphabet");
                let mut presence = BitSet::new(n);
                ext.iter().for_each(|&a| presence.insert(a));
                EncodedTrace { ext, count, presence }
            })
            .collect();
        Ok(Classifier {
            log,
            config,
            regular: (1..n - 1).collect(),
            index,
            traces,
            cache: Mutex::new(HashMap::new()),
            skeleton_builds: AtomicUsize::new(0),
        })
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    /// Number of filtered-log skeletons built so far (cache misses).
    pub fn skeleton_builds(&self) -> usize {
        self.skeleton_builds.load(Ordering::Relaxed)
    }

    fn prepare(&self, trace: &ActivityTrace) -> Result<Prepared> {
        let ext = self.index.encode(trace)?;
        let mut builder = SkeletonBuilder::new(self.index.clone());
        builder.add(&ext, 1);
        let mut presence = BitSet::new(self.index.len());
        ext.iter().for_each(|&a| presence.insert(a));
        Ok(Prepared {
            skeleton: builder.finish(),
            presence,
        })
    }

    fn filtered(&self, spec: &IndexSpec) -> Arc<Filtered> {
        let mut key = BitSet::new(self.traces.len());
        for (i, t) in self.traces.iter().enumerate() {
            if spec.admits(&t.presence) {
                key.insert(i);
            }
        }
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let mut builder = SkeletonBuilder::new(self.index.clone());
        let mut support = 0;
        for i in key.iter() {
            builder.add(&self.traces[i].ext, self.traces[i].count);
            support += self.traces[i].count;
        }
        self.skeleton_builds.fetch_add(1, Ordering::Relaxed);
        let filtered = Arc::new(Filtered {
            skeleton: builder.finish(),
            support,
        });
        self.cache.lock().expect("cache lock").entry(key).or_insert(filtered).clone()
    }

    fn to_filter_spec(&self, spec: &IndexSpec) -> FilterSpec {
        let set = |v: &[usize]| v.iter().map(|&i| self.index.activity(i).clone()).collect();
        FilterSpec::new(set(&spec.required), set(&spec.forbidden)).expect("index specs are disjoint")
    }

    /// First violation of one tier for a prepared trace, with the number of
    /// filters compared.
    fn check_tier(&self, trace: &Prepared, tier: Tier, cancel: Option<&AtomicBool>) -> (Option<Violation>, usize) {
        let mut checks = 0;
        for (size, relations) in tier.steps(self.config.max_filter_size) {
            if size > self.regular.len() {
                break;
            }
            for (required, forbidden) in assignments(self.regular.clone(), size) {
                if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
                    return (None, checks);
                }
                let spec = IndexSpec { required, forbidden };
                if !spec.admits(&trace.presence) {
                    continue;
                }
                let filtered = self.filtered(&spec);
                if filtered.support == 0 && self.config.skip_empty_training {
                    continue;
                }
                checks += 1;
                for &relation in relations {
                    if relation == Relation::DirectlyFollows && filtered.support < self.config.df_support_min {
                        continue;
                    }
                    if let Some((i, j)) = first_violation(relation, &filtered.skeleton, &trace.skeleton) {
                        let violation = Violation {
                            relation,
                            pair: (self.index.activity(i).clone(), self.index.activity(j).clone()),
                            spec: self.to_filter_spec(&spec),
                        };
                        return (Some(violation), checks);
                    }
                }
            }
        }
        (None, checks)
    }

    /// Whether the training log subsumes `trace`. Fails if the trace uses an
    /// activity outside the training alphabet.
    pub fn subsumes_trace(&self, trace: &ActivityTrace) -> Result<SubsumptionVerdict> {
        let prepared = self.prepare(trace)?;
        let violation = Tier::ORDER.into_iter().find_map(|tier| self.check_tier(&prepared, tier, None).0);
        Ok(SubsumptionVerdict::from_violation(violation))
    }

    /// Classifies `tests` tier by tier. Traces using activities outside the
    /// training alphabet are negative (`eq`) before the first tier runs.
    /// With a negative cap, evaluation stops at the first tier boundary
    /// where the cap is reached and all unlabelled traces become positive.
    pub fn classify_batch(&self, tests: &[LabeledTrace]) -> BatchReport {
        self.run_batch(tests, None).expect("uncancelled batch completes")
    }

    /// [`Classifier::classify_batch`] that gives up, returning `None`, once
    /// `cancel` is set. The flag is polled between filter checks.
    pub fn classify_batch_cancellable(&self, tests: &[LabeledTrace], cancel: &AtomicBool) -> Option<BatchReport> {
        self.run_batch(tests, Some(cancel))
    }

    fn run_batch(&self, tests: &[LabeledTrace], cancel: Option<&AtomicBool>) -> Option<BatchReport> {
        let prepared: Vec<Result<Prepared, Activity>> = tests
            .par_iter()
            .map(|t| {
                self.prepare(&t.trace)
                    .map_err(|_| self.unknown_activity(&t.trace).expect("encoding failed on an unknown activity"))
            })
            .collect();
        let mut outcome: Vec<Option<Violation>> = vec![None; tests.len()];
        let mut decided = vec![false; tests.len()];
        let mut negatives = 0;
        let mut early = 0;
        for (i, p) in prepared.iter().enumerate() {
            if let Err(unknown) = p {
                outcome[i] = Some(Violation {
                    relation: Relation::Equivalence,
                    pair: (Activity::Start, unknown.clone()),
                    spec: FilterSpec::none(),
                });
                decided[i] = true;
                early += 1;
            }
        }
        negatives += early;

        let mut tiers = Vec::new();
        let mut stopped_after = None;
        for (t, tier) in Tier::ORDER.into_iter().enumerate() {
            let pending: Vec<usize> = (0..tests.len()).filter(|&i| !decided[i]).collect();
            let results: Vec<(usize, Option<Violation>, usize)> = pending
                .par_iter()
                .map(|&i| {
                    let p = prepared[i].as_ref().expect("pending traces are prepared");
                    let (v, checks) = self.check_tier(p, tier, cancel);
                    (i, v, checks)
                })
                .collect();
            if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
                return None;
            }
            let mut stats = TierStats {
                tier,
                traces_checked: pending.len(),
                negatives: 0,
                spec_checks: 0,
            };
            for (i, v, checks) in results {
                stats.spec_checks += checks;
                if v.is_some() {
                    outcome[i] = v;
                    decided[i] = true;
                    stats.negatives += 1;
                    negatives += 1;
                }
            }
            tiers.push(stats);
            if let Some(cap) = self.config.negative_cap {
                if negatives >= cap && t + 1 < Tier::ORDER.len() {
                    stopped_after = Some(tier);
                    break;
                }
            }
        }

        let verdicts = tests
            .iter()
            .zip(outcome)
            .map(|(t, v)| match v {
                Some(v) => ClassificationVerdict::negative(t.id.clone(), v),
                None => ClassificationVerdict::positive(t.id.clone()),
            })
            .collect();
        Some(BatchReport {
            verdicts,
            unknown_activity: early,
            tiers,
            stopped_after,
        })
    }

    fn unknown_activity(&self, trace: &ActivityTrace) -> Option<Activity> {
        trace
            .iter()
            .find(|a| a.is_artificial() || self.index.position(a).is_none())
            .cloned()
    }

    pub fn log(&self) -> &ActivityLog {
        self.log
    }
}
