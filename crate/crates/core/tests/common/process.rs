//! Block-structured process models for contest-style experiments: random
//! models, playout, and exact trace membership. Every activity labels
//! exactly one leaf, which keeps membership linear.

use std::collections::BTreeSet;

use log_skeleton::{Activity, ActivityLog, ActivityTrace, LabeledTrace};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub enum Tree {
    Leaf(Activity),
    Seq(Vec<Tree>),
    Xor(Vec<Tree>),
    And(Vec<Tree>),
    /// Body, then any number of (redo, body) rounds.
    Loop(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn alphabet(&self) -> BTreeSet<Activity> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<Activity>) {
        match self {
            Tree::Leaf(a) => {
                out.insert(a.clone());
            }
            Tree::Seq(c) | Tree::Xor(c) | Tree::And(c) => c.iter().for_each(|t| t.collect(out)),
            Tree::Loop(b, r) => {
                b.collect(out);
                r.collect(out);
            }
        }
    }

    /// A random model over `n` fresh activities `t01`, `t02`, …
    pub fn random<R: Rng>(rng: &mut R, n: usize) -> Tree {
        let mut acts: Vec<Activity> = (1..=n).map(|i| Activity::new(&format!("t{i:02}")).unwrap()).collect();
        acts.shuffle(rng);
        Tree::build(rng, &acts, 0)
    }

    fn build<R: Rng>(rng: &mut R, acts: &[Activity], depth: usize) -> Tree {
        if acts.len() == 1 {
            return Tree::Leaf(acts[0].clone());
        }
        // sequences dominate near the root, like real processes
        let op = if depth == 0 { 0 } else { rng.random_range(0..10) };
        if op == 9 && acts.len() >= 2 {
            let cut = rng.random_range(1..acts.len());
            let body = Tree::build(rng, &acts[..cut], depth + 1);
            let redo = Tree::build(rng, &acts[cut..], depth + 1);
            return Tree::Loop(Box::new(body), Box::new(redo));
        }
        let parts = rng.random_range(2..=acts.len().min(if depth == 0 { 5 } else { 3 }));
        let mut cuts: Vec<usize> = (1..acts.len()).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
        cuts.sort_unstable();
        let mut children = Vec::new();
        let mut start = 0;
        for c in cuts.into_iter().chain([acts.len()]) {
            children.push(Tree::build(rng, &acts[start..c], depth + 1));
            start = c;
        }
        match op {
            0..=4 => Tree::Seq(children),
            5..=6 => Tree::Xor(children),
            _ => Tree::And(children),
        }
    }

    pub fn play<R: Rng>(&self, rng: &mut R) -> Vec<Activity> {
        match self {
            Tree::Leaf(a) => vec![a.clone()],
            Tree::Seq(c) => c.iter().flat_map(|t| t.play(rng)).collect(),
            Tree::Xor(c) => c[rng.random_range(0..c.len())].play(rng),
            Tree::And(c) => {
                let mut runs: Vec<std::collections::VecDeque<Activity>> = c.iter().map(|t| t.play(rng).into()).collect();
                let mut out = Vec::new();
                loop {
                    let live: Vec<usize> = (0..runs.len()).filter(|&i| !runs[i].is_empty()).collect();
                    if live.is_empty() {
                        break out;
                    }
                    let i = live[rng.random_range(0..live.len())];
                    out.push(runs[i].pop_front().unwrap());
                }
            }
            Tree::Loop(body, redo) => {
                let mut out = body.play(rng);
                let mut rounds = 0;
                while rounds < 3 && rng.random_bool(0.35) {
                    out.extend(redo.play(rng));
                    out.extend(body.play(rng));
                    rounds += 1;
                }
                out
            }
        }
    }

    /// Whether the model can produce exactly `trace`.
    pub fn accepts(&self, trace: &[Activity]) -> bool {
        match self {
            Tree::Leaf(a) => trace.len() == 1 && &trace[0] == a,
            Tree::Xor(c) => c.iter().any(|t| t.accepts(trace)),
            Tree::Seq(c) => {
                // children have disjoint alphabets and never produce the
                // empty trace, so each child owns a maximal run
                let mut rest = trace;
                for child in c {
                    let alpha = child.alphabet();
                    let n = rest.iter().take_while(|a| alpha.contains(a)).count();
                    if !child.accepts(&rest[..n]) {
                        return false;
                    }
                    rest = &rest[n..];
                }
                rest.is_empty()
            }
            Tree::And(c) => {
                let alphas: Vec<BTreeSet<Activity>> = c.iter().map(Tree::alphabet).collect();
                trace.iter().all(|a| alphas.iter().any(|s| s.contains(a)))
                    && c.iter().zip(&alphas).all(|(child, alpha)| {
                        let part: Vec<Activity> = trace.iter().filter(|a| alpha.contains(a)).cloned().collect();
                        child.accepts(&part)
                    })
            }
            Tree::Loop(body, redo) => {
                let (ab, ar) = (body.alphabet(), redo.alphabet());
                let mut rest = trace;
                let mut want_body = true;
                loop {
                    let alpha = if want_body { &ab } else { &ar };
                    let n = rest.iter().take_while(|a| alpha.contains(a)).count();
                    let part = &rest[..n];
                    let ok = if want_body { body.accepts(part) } else { redo.accepts(part) };
                    if !ok {
                        return false;
                    }
                    rest = &rest[n..];
                    if want_body && rest.is_empty() {
                        return true;
                    }
                    want_body = !want_body;
                }
            }
        }
    }
}

/// A contest-style case: a training log with truncation noise and ten
/// fitting plus ten non-fitting test traces.
pub struct Case {
    pub model: Tree,
    pub training: ActivityLog,
    pub tests: Vec<LabeledTrace>,
    pub expected: Vec<bool>,
}

fn mutate<R: Rng>(rng: &mut R, trace: &[Activity], alphabet: &[Activity]) -> Vec<Activity> {
    let mut t = trace.to_vec();
    match rng.random_range(0..4) {
        0 if t.len() >= 2 => {
            let i = rng.random_range(0..t.len() - 1);
            t.swap(i, i + 1);
        }
        1 if !t.is_empty() => {
            t.remove(rng.random_range(0..t.len()));
        }
        2 if !t.is_empty() => {
            let i = rng.random_range(0..t.len());
            let a = t[i].clone();
            t.insert(i, a);
        }
        _ => {
            let a = alphabet[rng.random_range(0..alphabet.len())].clone();
            t.insert(rng.random_range(0..=t.len()), a);
        }
    }
    t
}

pub fn case<R: Rng>(rng: &mut R, training_size: usize, noise: f64) -> Case {
    let n = rng.random_range(8..=15);
    let model = Tree::random(rng, n);
    let alphabet: Vec<Activity> = model.alphabet().into_iter().collect();
    let mut traces = Vec::with_capacity(training_size);
    for _ in 0..training_size {
        let mut t = model.play(rng);
        if t.len() >= 2 && rng.random_bool(noise) {
            let keep = rng.random_range(1..t.len());
            t.truncate(keep);
        }
        traces.push((ActivityTrace::new(t), 1));
    }
    let training = ActivityLog::new(model.alphabet(), traces.into_iter().collect()).unwrap();

    let mut tests = Vec::new();
    let mut expected = Vec::new();
    for _ in 0..10 {
        tests.push(ActivityTrace::new(model.play(rng)));
        expected.push(true);
    }
    while expected.len() < 20 {
        let base = model.play(rng);
        let bad = mutate(rng, &base, &alphabet);
        if !model.accepts(&bad) {
            tests.push(ActivityTrace::new(bad));
            expected.push(false);
        }
    }
    // interleave positives and negatives deterministically
    let mut order: Vec<usize> = (0..20).collect();
    order.shuffle(rng);
    let tests: Vec<ActivityTrace> = order.iter().map(|&i| tests[i].clone()).collect();
    let expected = order.iter().map(|&i| expected[i]).collect();
    Case {
        model,
        training,
        tests: LabeledTrace::numbered(tests),
        expected,
    }
}
