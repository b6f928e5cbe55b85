//! Property checks shared by the proptest suite and the acceptance run.

use std::collections::BTreeSet;

use log_skeleton::ingestion::{self, xes, LogFormat, TraceLinesOptions};
use log_skeleton::reduction::transitive_closure;
use log_skeleton::render::{emit_graph, expand, group_hyper_arcs, to_dot, Edge, EdgeKind, ViewConfig};
use log_skeleton::{
    classify_batch, subsumes_trace, Activity, ActivityLog, ActivityTrace, Bag, ClassificationVerdict, ClassifierConfig,
    FilterSpec, Label, LabeledTrace, LogSkeleton, Reason, Relation, Violation,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::gen;
use super::oracle::{self, Naive};

type Check = Result<(), TestCaseError>;

pub fn skeleton_matches_oracle(log: &ActivityLog) -> Check {
    let sk = LogSkeleton::build(log);
    let naive = Naive::new(log);
    prop_assert_eq!(sk.activities(), naive.alphabet.as_slice());
    prop_assert_eq!(sk.trace_count(), log.len());
    for x in &naive.alphabet {
        prop_assert_eq!(sk.sum_count(x).unwrap(), naive.sum(x));
        prop_assert_eq!(sk.min_count(x).unwrap(), naive.min(x));
        prop_assert_eq!(sk.max_count(x).unwrap(), naive.max(x));
        prop_assert_eq!(sk.representative(x).unwrap(), &naive.representative(x));
        for y in &naive.alphabet {
            for rel in Relation::ALL {
                prop_assert_eq!(sk.holds(rel, x, y).unwrap(), naive.holds(rel, x, y), "{} ({}, {})", rel, x, y);
            }
            prop_assert_eq!(sk.df_count(x, y).unwrap(), naive.df(x, y));
        }
    }
    Ok(())
}

pub fn subsumption_matches_exhaustive(log: &ActivityLog, trace: &ActivityTrace, config: &ClassifierConfig) -> Check {
    let fast = subsumes_trace(log, trace, config).unwrap();
    let slow = oracle::log_subsumes_trace(log, trace, config);
    prop_assert_eq!(fast.holds(), slow, "trace {} config {:?}", trace, config);
    if let Some(v) = fast.violation() {
        // the witness is real: that filter, that relation, that pair
        let filtered = log.filter(&v.spec).unwrap();
        prop_assert!(v.spec.admits(trace));
        prop_assert!(v.spec.size() <= config.max_filter_size);
        let big = Naive::new(&filtered);
        let small = Naive::new(&log.singleton(trace).unwrap());
        let (x, y) = &v.pair;
        if v.relation == Relation::DirectlyFollows {
            prop_assert!(filtered.len() >= config.df_support_min);
            prop_assert!(small.holds(v.relation, x, y) && !big.holds(v.relation, x, y));
        } else {
            prop_assert!(big.holds(v.relation, x, y) && !small.holds(v.relation, x, y));
        }
    }
    Ok(())
}

pub fn configs() -> Vec<ClassifierConfig> {
    let base = ClassifierConfig::default();
    let mut out = vec![base.clone(), ClassifierConfig::pdc()];
    for k in 0..=3 {
        for df in [1, 16] {
            out.push(ClassifierConfig {
                max_filter_size: k,
                df_support_min: df,
                ..base.clone()
            });
        }
    }
    out.push(ClassifierConfig {
        skip_empty_training: false,
        df_support_min: 1,
        ..base
    });
    out
}

pub fn self_subsumption(log: &ActivityLog) -> Check {
    let tests = LabeledTrace::numbered(log.iter().map(|(t, _)| t.clone()));
    for config in configs() {
        for v in classify_batch(log, &tests, &config).unwrap() {
            prop_assert_eq!(v.label, Label::Positive, "{:?} under {:?}", v, config);
        }
        for t in &tests {
            prop_assert!(subsumes_trace(log, &t.trace, &config).unwrap().holds());
        }
    }
    Ok(())
}

/// Uncapped batch labels agree with one-at-a-time subsumption, witness
/// included.
pub fn batch_matches_single(log: &ActivityLog, traces: &[ActivityTrace], config: &ClassifierConfig) -> Check {
    let tests = LabeledTrace::numbered(traces.iter().cloned());
    let verdicts = classify_batch(log, &tests, config).unwrap();
    for (t, v) in tests.iter().zip(&verdicts) {
        let single = subsumes_trace(log, &t.trace, config).unwrap();
        match single.violation() {
            None => prop_assert_eq!(v, &ClassificationVerdict::positive(t.id.clone())),
            Some(viol) => prop_assert_eq!(v, &ClassificationVerdict::negative(t.id.clone(), viol.clone())),
        }
    }
    Ok(())
}

fn always_pairs(edges: &[Edge], after: bool) -> BTreeSet<(Activity, Activity)> {
    expand(edges)
        .into_iter()
        .filter(|e| e.kind == EdgeKind::Always)
        .filter(|e| if after { e.tail.open_box } else { e.head.open_box })
        .map(|e| {
            let (s, t) = (e.sources[0].clone(), e.targets[0].clone());
            if after {
                (s, t)
            } else {
                (t, s)
            }
        })
        .collect()
}

pub fn reduction_preserves_closure(log: &ActivityLog, visible: Option<BTreeSet<Activity>>, hyper: bool) -> Check {
    let sk = LogSkeleton::build(log);
    let view = ViewConfig {
        activities: visible.clone(),
        hyper_arcs: hyper,
        ..ViewConfig::default()
    };
    let g = emit_graph(&sk, &view).unwrap();
    let shown = |a: &Activity| visible.as_ref().is_none_or(|v| v.contains(a));
    for (rel, after) in [(Relation::AlwaysAfter, true), (Relation::AlwaysBefore, false)] {
        let stored: BTreeSet<(Activity, Activity)> = sk
            .pairs(rel)
            .into_iter()
            .filter(|(x, y)| shown(x) && shown(y))
            .collect();
        let drawn = always_pairs(&g.edges, after);
        prop_assert!(drawn.is_subset(&stored));
        prop_assert_eq!(transitive_closure(&drawn), stored);
    }
    Ok(())
}

/// Every occurrence except the end marker is directly followed by one
/// activity, and every occurrence except the start marker follows one.
pub fn flow_conservation(log: &ActivityLog) -> Check {
    let sk = LogSkeleton::build(log);
    for x in sk.activities() {
        let out: usize = sk.activities().iter().map(|y| sk.df_count(x, y).unwrap()).sum();
        let inn: usize = sk.activities().iter().map(|y| sk.df_count(y, x).unwrap()).sum();
        let sum = sk.sum_count(x).unwrap();
        prop_assert_eq!(out, if *x == Activity::End { 0 } else { sum });
        prop_assert_eq!(inn, if *x == Activity::Start { 0 } else { sum });
    }
    prop_assert_eq!(sk.sum_count(&Activity::Start).unwrap(), log.len());
    Ok(())
}

fn sorted(mut edges: Vec<Edge>) -> Vec<Edge> {
    edges.sort();
    edges
}

pub fn hyper_arcs_lossless(log: &ActivityLog, relations: BTreeSet<Relation>) -> Check {
    let sk = LogSkeleton::build(log);
    let view = ViewConfig {
        relations,
        ..ViewConfig::default()
    };
    let flat = emit_graph(&sk, &view).unwrap();
    prop_assert!(flat.edges.iter().all(|e| !e.is_hyper()));
    let grouped = group_hyper_arcs(flat.clone());
    prop_assert!(grouped.edges.len() <= flat.edges.len());
    prop_assert_eq!(sorted(expand(&grouped.edges)), sorted(flat.edges.clone()));
    let direct = emit_graph(
        &sk,
        &ViewConfig {
            hyper_arcs: true,
            ..view
        },
    )
    .unwrap();
    prop_assert_eq!(&direct, &grouped);
    prop_assert_eq!(to_dot(&direct), to_dot(&grouped));
    Ok(())
}

/// No directly-follows edge where a visible always relation covers the
/// ordered pair; an edge for every other positive count.
pub fn priority_rule(log: &ActivityLog) -> Check {
    let sk = LogSkeleton::build(log);
    let view = ViewConfig::with_relations([Relation::AlwaysAfter, Relation::AlwaysBefore, Relation::DirectlyFollows]);
    let g = emit_graph(&sk, &view).unwrap();
    let mut drawn = BTreeSet::new();
    for e in g.edges.iter().filter(|e| e.kind == EdgeKind::DirectlyFollows) {
        let (s, t) = (e.sources[0].clone(), e.targets[0].clone());
        if e.counts.len() == 2 {
            drawn.insert((t.clone(), s.clone()));
        }
        drawn.insert((s, t));
    }
    for x in sk.activities() {
        for y in sk.activities() {
            let covered = sk.always_after(x, y).unwrap() || sk.always_before(y, x).unwrap();
            let expected = sk.df_count(x, y).unwrap() > 0 && !covered;
            prop_assert_eq!(drawn.contains(&(x.clone(), y.clone())), expected, "({}, {})", x, y);
        }
    }
    Ok(())
}

pub fn rendering_deterministic(log: &ActivityLog) -> Check {
    let mut all = ViewConfig::with_relations(Relation::ALL);
    all.hyper_arcs = true;
    for view in [ViewConfig::default(), all] {
        let a = to_dot(&emit_graph(&LogSkeleton::build(log), &view).unwrap());
        let b = to_dot(&emit_graph(&LogSkeleton::build(&log.clone()), &view).unwrap());
        prop_assert_eq!(a, b);
    }
    Ok(())
}

pub fn report_round_trip(verdicts: &[ClassificationVerdict]) -> Check {
    prop_assert_eq!(&ingestion::parse_report(&ingestion::write_report(verdicts)).unwrap(), verdicts);
    prop_assert_eq!(&ingestion::parse_report_json(&ingestion::write_report_json(verdicts)).unwrap(), verdicts);
    Ok(())
}

pub fn log_formats_round_trip(log: &ActivityLog) -> Check {
    for delimiter in [',', ';', '\t'] {
        let options = TraceLinesOptions { delimiter };
        let text = ingestion::write_trace_lines(log, &options);
        let back = ingestion::parse_trace_lines(&text, &options).unwrap().into_log().unwrap();
        prop_assert_eq!(&back, log, "{}", text);
    }
    let from_xes = ingestion::parse_log(xes::write_xes(log).as_bytes(), LogFormat::Xes).unwrap();
    let observed: BTreeSet<Activity> = log.iter().flat_map(|(t, _)| t.iter().cloned()).collect();
    let expected = ActivityLog::new(observed, log.traces().clone()).unwrap();
    prop_assert_eq!(from_xes, expected);
    Ok(())
}

/// Activity names that exercise every quoting rule.
pub const AWKWARD: [&str; 12] = [
    "a", "b c", "x,y", "say \"hi\"", "{s}", " pad", "<>", "#h", "tab\tx", "n×2", "f(x)", "semi;colon",
];

pub fn awkward_log() -> impl Strategy<Value = ActivityLog> {
    let name = prop::sample::select(&AWKWARD[..]);
    let trace = prop::collection::vec(name.clone(), 0..6).prop_map(|ns| ActivityTrace::from_names(ns).unwrap());
    (prop::collection::vec(trace, 0..8), prop::collection::btree_set(name, 0..3)).prop_map(|(traces, extra)| {
        let bag: Bag<ActivityTrace> = traces.into_iter().collect();
        let mut alphabet: BTreeSet<Activity> = bag.iter().flat_map(|(t, _)| t.iter().cloned()).collect();
        alphabet.extend(extra.into_iter().map(|n| Activity::new(n).unwrap()));
        ActivityLog::new(alphabet, bag).unwrap()
    })
}

fn any_activity() -> impl Strategy<Value = Activity> {
    prop_oneof![
        1 => Just(Activity::Start),
        1 => Just(Activity::End),
        6 => prop::sample::select(&AWKWARD[..]).prop_map(|n| Activity::new(n).unwrap()),
    ]
}

fn regular_set() -> impl Strategy<Value = BTreeSet<Activity>> {
    prop::collection::btree_set(prop::sample::select(&AWKWARD[..]).prop_map(|n| Activity::new(n).unwrap()), 0..3)
}

pub fn verdict() -> impl Strategy<Value = ClassificationVerdict> {
    let id = "[ -~\t]{0,8}";
    let negative = (
        id,
        prop::sample::select(vec![
            Relation::Equivalence,
            Relation::AlwaysAfter,
            Relation::AlwaysBefore,
            Relation::DirectlyFollows,
        ]),
        any_activity(),
        any_activity(),
        regular_set(),
        regular_set(),
    )
        .prop_map(|(id, relation, x, y, req, fbd)| {
            let fbd: BTreeSet<Activity> = fbd.difference(&req).cloned().collect();
            ClassificationVerdict::negative(
                id,
                Violation {
                    relation,
                    pair: (x, y),
                    spec: FilterSpec::new(req, fbd).unwrap(),
                },
            )
        });
    prop_oneof![id.prop_map(ClassificationVerdict::positive), negative]
}

pub fn reasons_are_table_vocabulary(verdicts: &[ClassificationVerdict]) -> Check {
    for v in verdicts {
        prop_assert_eq!(v.label == Label::Positive, v.reason == Reason::Positive);
        prop_assert!(["+", "eq", "aa", "ab", "df"].contains(&v.reason.code()));
    }
    Ok(())
}

/// A random log over `n` activities paired with random test traces.
pub fn log_and_traces(n: usize) -> impl Strategy<Value = (ActivityLog, Vec<ActivityTrace>)> {
    (gen::log_over(n, 20, 8), prop::collection::vec(gen::trace_over(n, 8), 1..6))
}
