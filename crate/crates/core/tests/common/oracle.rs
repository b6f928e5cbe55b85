//! Direct evaluation of the skeleton formulas and of bounded subsumption,
//! written for clarity rather than speed.

use std::collections::BTreeSet;

use log_skeleton::{Activity, ActivityLog, ActivityTrace, ClassifierConfig, FilterSpec, Relation};

/// The extended traces of a log with multiplicities, plus the extended
/// alphabet in activity order.
pub struct Naive {
    pub alphabet: Vec<Activity>,
    pub traces: Vec<(Vec<Activity>, usize)>,
}

impl Naive {
    pub fn new(log: &ActivityLog) -> Naive {
        let mut alphabet = vec![Activity::Start];
        alphabet.extend(log.alphabet().iter().cloned());
        alphabet.push(Activity::End);
        let traces = log
            .iter()
            .map(|(t, n)| {
                let mut ext = vec![Activity::Start];
                ext.extend(t.iter().cloned());
                ext.push(Activity::End);
                (ext, n)
            })
            .collect();
        Naive { alphabet, traces }
    }

    fn projected<'a>(trace: &'a [Activity], keep: &[&Activity]) -> Vec<&'a Activity> {
        trace.iter().filter(|x| keep.contains(x)).collect()
    }

    fn count(trace: &[Activity], a: &Activity) -> usize {
        Self::projected(trace, &[a]).len()
    }

    /// The relation as defined, except that the diagonal of the always and
    /// never-together relations is excluded by convention.
    pub fn holds(&self, rel: Relation, a: &Activity, b: &Activity) -> bool {
        if a == b && rel != Relation::Equivalence && rel != Relation::DirectlyFollows {
            return false;
        }
        let each = |f: &dyn Fn(&[Activity]) -> bool| self.traces.iter().all(|(t, _)| f(t));
        match rel {
            Relation::Equivalence => each(&|t| Self::count(t, a) == Self::count(t, b)),
            Relation::AlwaysAfter => each(&|t| {
                Self::count(t, a) == 0 || Self::projected(t, &[a, b]).last() == Some(&b)
            }),
            Relation::AlwaysBefore => each(&|t| {
                Self::count(t, a) == 0 || Self::projected(t, &[a, b]).first() == Some(&b)
            }),
            Relation::NeverTogether => each(&|t| Self::count(t, a) == 0 || Self::count(t, b) == 0),
            Relation::DirectlyFollows => self.df(a, b) > 0,
        }
    }

    pub fn df(&self, a: &Activity, b: &Activity) -> usize {
        self.traces
            .iter()
            .map(|(t, n)| n * t.windows(2).filter(|w| &w[0] == a && &w[1] == b).count())
            .sum()
    }

    pub fn sum(&self, a: &Activity) -> usize {
        self.traces.iter().map(|(t, n)| n * Self::count(t, a)).sum()
    }

    pub fn min(&self, a: &Activity) -> usize {
        self.traces.iter().map(|(t, _)| Self::count(t, a)).min().unwrap_or(0)
    }

    pub fn max(&self, a: &Activity) -> usize {
        self.traces.iter().map(|(t, _)| Self::count(t, a)).max().unwrap_or(0)
    }

    pub fn representative(&self, a: &Activity) -> Activity {
        self.alphabet
            .iter()
            .filter(|b| self.holds(Relation::Equivalence, a, b))
            .min()
            .cloned()
            .expect("a is equivalent to itself")
    }

    pub fn pairs(&self, rel: Relation) -> BTreeSet<(Activity, Activity)> {
        let mut out = BTreeSet::new();
        for x in &self.alphabet {
            for y in &self.alphabet {
                if self.holds(rel, x, y) {
                    out.insert((x.clone(), y.clone()));
                }
            }
        }
        out
    }
}

/// Which relations of `small` break subsumption by `big`, given the
/// directly-follows support of `big`.
pub fn violated(big: &Naive, small: &Naive, df_counts: bool) -> Vec<Relation> {
    let mut out = Vec::new();
    for rel in [Relation::Equivalence, Relation::AlwaysAfter, Relation::AlwaysBefore] {
        if !big.pairs(rel).is_subset(&small.pairs(rel)) {
            out.push(rel);
        }
    }
    if df_counts && !small.pairs(Relation::DirectlyFollows).is_subset(&big.pairs(Relation::DirectlyFollows)) {
        out.push(Relation::DirectlyFollows);
    }
    out
}

/// Every filter spec of size ≤ `bound`, by assigning each activity to
/// required, forbidden or neither.
pub fn all_specs(alphabet: &BTreeSet<Activity>, bound: usize) -> Vec<FilterSpec> {
    let acts: Vec<&Activity> = alphabet.iter().collect();
    let mut out = Vec::new();
    let total = 3usize.pow(acts.len() as u32);
    for code in 0..total {
        let (mut req, mut fbd) = (BTreeSet::new(), BTreeSet::new());
        let mut c = code;
        for a in &acts {
            match c % 3 {
                1 => {
                    req.insert((*a).clone());
                }
                2 => {
                    fbd.insert((*a).clone());
                }
                _ => {}
            }
            c /= 3;
        }
        if req.len() + fbd.len() <= bound {
            out.push(FilterSpec::new(req, fbd).unwrap());
        }
    }
    out
}

/// Bounded subsumption of a trace by exhaustive filter enumeration.
pub fn log_subsumes_trace(log: &ActivityLog, trace: &ActivityTrace, config: &ClassifierConfig) -> bool {
    let single = log.singleton(trace).unwrap();
    let small = Naive::new(&single);
    all_specs(log.alphabet(), config.max_filter_size).iter().all(|spec| {
        if !spec.admits(trace) {
            return true;
        }
        let filtered = log.filter(spec).unwrap();
        if filtered.is_empty() && config.skip_empty_training {
            return true;
        }
        let big = Naive::new(&filtered);
        violated(&big, &small, filtered.len() >= config.df_support_min).is_empty()
    })
}
