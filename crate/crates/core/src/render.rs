//! Graph views of a skeleton.
//!
//! Nodes are activities; the bottom label line shows the class
//! representative, the total count and the per-trace count interval.
//! Always relations are transitively reduced and drawn as one arc kind: an
//! always-after pair `(a, b)` is an arc `a → b` with an open box at the tail,
//! an always-before pair `(a, b)` is an arc `b → a` with an open box at the
//! head, and the two merge when they land on the same arc. Never-together
//! pairs are undirected dashed edges. Directly-follows edges carry counts; a
//! bidirectional pair is one edge with a triangle head (forward count) and a
//! vee tail (reverse count). A directly-follows edge is dropped where a
//! visible always relation covers the same ordered pair.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::log_model::{Activity, FilterSpec};
use crate::reduction::reduce;
use crate::skeleton::{LogSkeleton, Relation};

/// Fill colors, one per equivalence class rank; wraps when exhausted.
pub const PALETTE: [&str; 12] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd",
    "#ccebc5", "#ffed6f",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViewConfig {
    /// `None` shows every activity, including the artificial ones.
    pub activities: Option<BTreeSet<Activity>>,
    pub relations: BTreeSet<Relation>,
    pub hyper_arcs: bool,
}

impl Default for ViewConfig {
    fn default() -> Self {
        ViewConfig {
            activities: None,
            relations: [Relation::AlwaysAfter, Relation::AlwaysBefore].into_iter().collect(),
            hyper_arcs: false,
        }
    }
}

impl ViewConfig {
    pub fn with_relations<I: IntoIterator<Item = Relation>>(relations: I) -> Self {
        ViewConfig {
            relations: relations.into_iter().collect(),
            ..ViewConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Always,
    NeverTogether,
    DirectlyFollows,
    Equivalence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrow {
    Triangle,
    Vee,
}

/// Decoration at one end of an edge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EndMark {
    pub arrow: Option<Arrow>,
    pub open_box: bool,
}

impl EndMark {
    const NONE: EndMark = EndMark {
        arrow: None,
        open_box: false,
    };

    fn dot_name(self) -> &'static str {
        match (self.arrow, self.open_box) {
            (None, false) => "none",
            (None, true) => "obox",
            (Some(Arrow::Triangle), false) => "normal",
            (Some(Arrow::Triangle), true) => "normalobox",
            (Some(Arrow::Vee), false) => "vee",
            (Some(Arrow::Vee), true) => "veeobox",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub activity: Activity,
    pub label: Vec<String>,
    /// Rank of the node's equivalence class.
    pub class: usize,
    pub color: String,
    pub representative: Activity,
    pub sum: usize,
    pub min: usize,
    pub max: usize,
}

/// An edge from every source to every target. Without hyper arcs both sets
/// are singletons.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub sources: Vec<Activity>,
    pub targets: Vec<Activity>,
    pub kind: EdgeKind,
    pub tail: EndMark,
    pub head: EndMark,
    /// Directly-follows counts: forward, then reverse for merged pairs.
    pub counts: Vec<usize>,
}

impl Edge {
    fn simple(source: &Activity, target: &Activity, kind: EdgeKind, tail: EndMark, head: EndMark, counts: Vec<usize>) -> Self {
        Edge {
            sources: vec![source.clone()],
            targets: vec![target.clone()],
            kind,
            tail,
            head,
            counts,
        }
    }

    pub fn is_hyper(&self) -> bool {
        self.sources.len() > 1 || self.targets.len() > 1
    }

    /// `"13/7"` for merged directly-follows edges.
    pub fn count_label(&self) -> Option<String> {
        if self.counts.is_empty() {
            return None;
        }
        Some(self.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("/"))
    }
}

/// What a graph was built from, enough to rebuild it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub log: String,
    pub required: BTreeSet<Activity>,
    pub forbidden: BTreeSet<Activity>,
    pub activities: Option<BTreeSet<Activity>>,
    pub relations: BTreeSet<Relation>,
    pub hyper_arcs: bool,
    pub trace_count: usize,
    pub command: String,
}

impl Provenance {
    pub fn new(log: impl Into<String>, spec: &FilterSpec, view: &ViewConfig, trace_count: usize) -> Self {
        let log = log.into();
        let join = |set: &BTreeSet<Activity>| set.iter().map(Activity::label).collect::<Vec<_>>().join(",");
        let mut command = format!("logskel build {log}");
        if !spec.required().is_empty() {
            write!(command, " --required {}", join(spec.required())).unwrap();
        }
        if !spec.forbidden().is_empty() {
            write!(command, " --forbidden {}", join(spec.forbidden())).unwrap();
        }
        if view.relations != ViewConfig::default().relations {
            let names: Vec<&str> = view.relations.iter().map(|r| r.name()).collect();
            write!(command, " --relations {}", names.join(",")).unwrap();
        }
        if let Some(acts) = &view.activities {
            write!(command, " --activities {}", join(acts)).unwrap();
        }
        if view.hyper_arcs {
            command.push_str(" --hyper");
        }
        Provenance {
            log,
            required: spec.required().clone(),
            forbidden: spec.forbidden().clone(),
            activities: view.activities.clone(),
            relations: view.relations.clone(),
            hyper_arcs: view.hyper_arcs,
            trace_count,
            command,
        }
    }

    fn lines(&self) -> Vec<String> {
        let set = |s: &BTreeSet<Activity>| {
            if s.is_empty() {
                "-".to_string()
            } else {
                s.iter().map(Activity::label).collect::<Vec<_>>().join(", ")
            }
        };
        vec![
            format!("log: {}", self.log),
            format!("traces: {}", self.trace_count),
            format!("required: {}", set(&self.required)),
            format!("forbidden: {}", set(&self.forbidden)),
            format!(
                "activities: {}",
                self.activities.as_ref().map_or_else(|| "all".to_string(), set)
            ),
            format!(
                "relations: {}",
                self.relations.iter().map(|r| r.name()).collect::<Vec<_>>().join(", ")
            ),
            format!("hyper arcs: {}", if self.hyper_arcs { "yes" } else { "no" }),
            format!("command: {}", self.command),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl SkeletonGraph {
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }
}

/// The two label lines: the name, then `representative sum interval`.
pub fn node_label(skel: &LogSkeleton, a: &Activity) -> Result<Vec<String>> {
    let (min, max) = (skel.min_count(a)?, skel.max_count(a)?);
    let interval = if min == max {
        min.to_string()
    } else {
        format!("{min}..{max}")
    };
    Ok(vec![
        a.label().to_string(),
        format!("{} {} {}", skel.representative(a)?, skel.sum_count(a)?, interval),
    ])
}

/// Builds the graph for `view`. Fails if the view names an activity the
/// skeleton doesn't know.
pub fn emit_graph(skel: &LogSkeleton, view: &ViewConfig) -> Result<SkeletonGraph> {
    let index = skel.index();
    let n = index.len();
    let visible: Vec<usize> = match &view.activities {
        None => (0..n).collect(),
        Some(set) => {
            let mut v = set
                .iter()
                .map(|a| {
                    index
                        .position(a)
                        .ok_or_else(|| Error::invalid(format!("unknown activity {a} in view")))
                })
                .collect::<Result<Vec<_>>>()?;
            v.sort_unstable();
            v
        }
    };
    let shown = |rel: Relation| view.relations.contains(&rel);
    let act = |i: usize| index.activity(i);

    let nodes = visible
        .iter()
        .map(|&i| {
            let a = act(i);
            let class = skel.class_index(i);
            Ok(Node {
                activity: a.clone(),
                label: node_label(skel, a)?,
                class,
                color: PALETTE[class % PALETTE.len()].to_string(),
                representative: skel.representative(a)?.clone(),
                sum: skel.sum_at(i),
                min: skel.min_at(i),
                max: skel.max_at(i),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut edges = Vec::new();

    // always arcs keyed by (from, to) in node-local indices
    let restrict = |m: &BitMatrix| {
        let mut r = BitMatrix::new(visible.len());
        for (x, &i) in visible.iter().enumerate() {
            for (y, &j) in visible.iter().enumerate() {
                if m.get(i, j) {
                    r.set(x, y);
                }
            }
        }
        r
    };
    let mut arcs: BTreeMap<(usize, usize), (bool, bool)> = BTreeMap::new();
    if shown(Relation::AlwaysAfter) {
        for (x, y) in reduce(&restrict(skel.always_after_matrix())) {
            arcs.entry((x, y)).or_default().0 = true;
        }
    }
    if shown(Relation::AlwaysBefore) {
        for (x, y) in reduce(&restrict(skel.always_before_matrix())) {
            arcs.entry((y, x)).or_default().1 = true;
        }
    }
    for (&(x, y), &(after, before)) in &arcs {
        let tail = EndMark {
            arrow: None,
            open_box: after,
        };
        let head = EndMark {
            arrow: Some(Arrow::Triangle),
            open_box: before,
        };
        edges.push(Edge::simple(act(visible[x]), act(visible[y]), EdgeKind::Always, tail, head, vec![]));
    }

    if shown(Relation::NeverTogether) {
        let nt = skel.never_together_matrix();
        for (x, &i) in visible.iter().enumerate() {
            for &j in &visible[x + 1..] {
                if nt.get(i, j) {
                    edges.push(Edge::simple(act(i), act(j), EdgeKind::NeverTogether, EndMark::NONE, EndMark::NONE, vec![]));
                }
            }
        }
    }

    if shown(Relation::DirectlyFollows) {
        let covered = |i: usize, j: usize| {
            (shown(Relation::AlwaysAfter) && skel.always_after_matrix().get(i, j))
                || (shown(Relation::AlwaysBefore) && skel.always_before_matrix().get(j, i))
        };
        let df = |i: usize, j: usize| {
            let c = skel.df_at(i, j);
            (c > 0 && !covered(i, j)).then_some(c)
        };
        let triangle = EndMark {
            arrow: Some(Arrow::Triangle),
            open_box: false,
        };
        let vee = EndMark {
            arrow: Some(Arrow::Vee),
            open_box: false,
        };
        for (x, &i) in visible.iter().enumerate() {
            for (y, &j) in visible.iter().enumerate() {
                let Some(fwd) = df(i, j) else { continue };
                if i == j {
                    edges.push(Edge::simple(act(i), act(j), EdgeKind::DirectlyFollows, EndMark::NONE, triangle, vec![fwd]));
                    continue;
                }
                match df(j, i) {
                    Some(rev) if x < y => {
                        edges.push(Edge::simple(act(i), act(j), EdgeKind::DirectlyFollows, vee, triangle, vec![fwd, rev]))
                    }
                    Some(_) => {}
                    None => edges.push(Edge::simple(act(i), act(j), EdgeKind::DirectlyFollows, EndMark::NONE, triangle, vec![fwd])),
                }
            }
        }
    }

    if shown(Relation::Equivalence) {
        let mut first: BTreeMap<usize, usize> = BTreeMap::new();
        for &i in &visible {
            let class = skel.class_index(i);
            match first.get(&class) {
                None => {
                    first.insert(class, i);
                }
                Some(&f) => {
                    edges.push(Edge::simple(act(f), act(i), EdgeKind::Equivalence, EndMark::NONE, EndMark::NONE, vec![]))
                }
            }
        }
    }

    let graph = SkeletonGraph {
        nodes,
        edges: sort_edges(edges, skel),
        provenance: None,
    };
    Ok(if view.hyper_arcs { group_hyper_arcs(graph) } else { graph })
}

fn sort_edges(mut edges: Vec<Edge>, skel: &LogSkeleton) -> Vec<Edge> {
    let pos = |a: &Activity| skel.index().position(a).unwrap_or(usize::MAX);
    edges.sort_by_cached_key(|e| {
        (
            e.kind,
            e.sources.iter().map(pos).collect::<Vec<_>>(),
            e.targets.iter().map(pos).collect::<Vec<_>>(),
        )
    });
    edges
}

type Decoration = (EdgeKind, EndMark, EndMark, Vec<usize>);
type Adjacency = BTreeMap<(usize, Activity), BTreeSet<(usize, Activity)>>;

/// Merges identically decorated edges into hyper edges. Greedy: within each
/// decoration group, take the smallest remaining source, its remaining
/// targets T, and every source that still reaches all of T; emit that
/// biclique and repeat. The expanded pair set is unchanged.
pub fn group_hyper_arcs(graph: SkeletonGraph) -> SkeletonGraph {
    let order: BTreeMap<Activity, usize> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.activity.clone(), i))
        .collect();
    let rank = |a: &Activity| order.get(a).copied().unwrap_or(usize::MAX);

    let mut groups: BTreeMap<Decoration, Adjacency> = BTreeMap::new();
    for e in expand(&graph.edges) {
        let key = (e.kind, e.tail, e.head, e.counts.clone());
        let s = &e.sources[0];
        let t = &e.targets[0];
        groups
            .entry(key)
            .or_default()
            .entry((rank(s), s.clone()))
            .or_default()
            .insert((rank(t), t.clone()));
    }

    let mut edges = Vec::new();
    for ((kind, tail, head, counts), mut adjacency) in groups {
        while let Some((_, targets)) = adjacency.iter().next() {
            let targets = targets.clone();
            let sources: Vec<(usize, Activity)> = adjacency
                .iter()
                .filter(|(_, ts)| targets.is_subset(ts))
                .map(|(s, _)| s.clone())
                .collect();
            for s in &sources {
                let remaining = adjacency.get_mut(s).expect("source present");
                remaining.retain(|t| !targets.contains(t));
                if remaining.is_empty() {
                    adjacency.remove(s);
                }
            }
            edges.push(Edge {
                sources: sources.into_iter().map(|(_, a)| a).collect(),
                targets: targets.into_iter().map(|(_, a)| a).collect(),
                kind,
                tail,
                head,
                counts: counts.clone(),
            });
        }
    }
    edges.sort_by_cached_key(|e| {
        (
            e.kind,
            e.sources.iter().map(rank).collect::<Vec<_>>(),
            e.targets.iter().map(rank).collect::<Vec<_>>(),
        )
    });
    SkeletonGraph { edges, ..graph }
}

/// One single-source, single-target edge per represented pair.
pub fn expand(edges: &[Edge]) -> Vec<Edge> {
    edges
        .iter()
        .flat_map(|e| {
            e.sources.iter().flat_map(move |s| {
                e.targets
                    .iter()
                    .map(move |t| Edge::simple(s, t, e.kind, e.tail, e.head, e.counts.clone()))
            })
        })
        .collect()
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn edge_attrs(e: &Edge, with_label: bool) -> String {
    let mut attrs = vec!["dir=both".to_string()];
    attrs.push(format!("arrowtail={}", e.tail.dot_name()));
    attrs.push(format!("arrowhead={}", e.head.dot_name()));
    match e.kind {
        EdgeKind::NeverTogether => attrs.push("style=dashed".into()),
        EdgeKind::Equivalence => attrs.push("style=dotted".into()),
        _ => {}
    }
    if with_label {
        if let Some(label) = e.count_label() {
            attrs.push(format!("label={}", quote(&label)));
        }
    }
    attrs.join(", ")
}

/// Graphviz text for `graph`. Node ids follow node order; hyper edges route
/// through point-shaped junction nodes.
pub fn to_dot(graph: &SkeletonGraph) -> String {
    let ids: BTreeMap<&Activity, String> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (&n.activity, format!("n{i}")))
        .collect();
    let id = |a: &Activity| ids.get(a).cloned().unwrap_or_else(|| quote(a.label()));

    let mut out = String::from("digraph skeleton {\n");
    out.push_str("  node [shape=box, style=\"rounded,filled\", fontname=\"Helvetica\"];\n");
    out.push_str("  edge [fontname=\"Helvetica\"];\n");
    for (i, n) in graph.nodes.iter().enumerate() {
        writeln!(out, "  n{i} [label={}, fillcolor={}];", quote(&n.label.join("\n")), quote(&n.color)).unwrap();
    }
    let mut junctions = 0;
    for e in &graph.edges {
        if !e.is_hyper() {
            writeln!(out, "  {} -> {} [{}];", id(&e.sources[0]), id(&e.targets[0]), edge_attrs(e, true)).unwrap();
            continue;
        }
        let j = format!("j{junctions}");
        junctions += 1;
        match e.count_label() {
            Some(label) => writeln!(out, "  {j} [shape=point, xlabel={}];", quote(&label)).unwrap(),
            None => writeln!(out, "  {j} [shape=point];").unwrap(),
        }
        let into = Edge {
            head: EndMark::NONE,
            ..e.clone()
        };
        let from = Edge {
            tail: EndMark::NONE,
            ..e.clone()
        };
        for s in &e.sources {
            writeln!(out, "  {} -> {j} [{}];", id(s), edge_attrs(&into, false)).unwrap();
        }
        for t in &e.targets {
            writeln!(out, "  {j} -> {} [{}];", id(t), edge_attrs(&from, false)).unwrap();
        }
    }
    if let Some(p) = &graph.provenance {
        let mut label: String = p.lines().iter().map(|l| format!("{l}\n")).collect();
        label.pop();
        writeln!(
            out,
            "  provenance [shape=box, style=\"rounded,filled\", fillcolor=\"#ffffcc\", label={}];",
            quote(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Pretty JSON document for the graph, newline terminated.
pub fn to_json(graph: &SkeletonGraph) -> String {
    let mut s = serde_json::to_string_pretty(graph).expect("graph serializes");
    s.push('\n');
    s
}

/// Output formats for a skeleton view.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentFormat {
    /// The graph document as JSON.
    #[default]
    Json,
    /// Graphviz text.
    Dot,
    /// The skeleton itself as JSON, without view processing.
    Skeleton,
}

impl std::str::FromStr for DocumentFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(DocumentFormat::Json),
            "dot" => Ok(DocumentFormat::Dot),
            "skeleton" => Ok(DocumentFormat::Skeleton),
            other => Err(Error::invalid(format!("unknown output format {other:?}"))),
        }
    }
}

/// The graph for `view` with provenance attached. `skel` must be the
/// skeleton of the named log filtered by `spec`.
pub fn view_graph(skel: &LogSkeleton, log_name: &str, spec: &FilterSpec, view: &ViewConfig) -> Result<SkeletonGraph> {
    let provenance = Provenance::new(log_name, spec, view, skel.trace_count());
    Ok(emit_graph(skel, view)?.with_provenance(provenance))
}

/// The text served for a view in the given format.
pub fn document(
    skel: &LogSkeleton,
    log_name: &str,
    spec: &FilterSpec,
    view: &ViewConfig,
    format: DocumentFormat,
) -> Result<String> {
    Ok(match format {
        DocumentFormat::Json => to_json(&view_graph(skel, log_name, spec, view)?),
        DocumentFormat::Dot => to_dot(&view_graph(skel, log_name, spec, view)?),
        DocumentFormat::Skeleton => skel.to_json(),
    })
}

/// Parses a comma-separated relation list (names or codes). The empty
/// string is the empty set.
pub fn parse_relations(s: &str) -> Result<BTreeSet<Relation>> {
    s.split(',')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(str::parse)
        .collect()
}
