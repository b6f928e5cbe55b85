//! Transitive closure and reduction of binary relations.
//!
//! Reduction works on the condensation of the relation: nodes that reach
//! each other form a component, components are reduced as a DAG, and every
//! kept edge connects the smallest members of its two components. Members of
//! a cyclic component are linked in a ring (ascending order) so the closure
//! is preserved. Reflexive pairs are ignored throughout.

use std::collections::{BTreeMap, BTreeSet};

use crate::bits::BitMatrix;

/// Transitive closure of `relation`, without reflexive pairs.
pub fn transitive_closure<T: Ord + Clone>(relation: &BTreeSet<(T, T)>) -> BTreeSet<(T, T)> {
    let (nodes, matrix) = to_matrix(relation);
    let mut closed = matrix;
    closed.close_transitively();
    closed
        .pairs()
        .filter(|(i, j)| i != j)
        .map(|(i, j)| (nodes[i].clone(), nodes[j].clone()))
        .collect()
}

/// A minimal relation with the same transitive closure as `relation`
/// (reflexive pairs aside).
pub fn transitive_reduction<T: Ord + Clone>(relation: &BTreeSet<(T, T)>) -> BTreeSet<(T, T)> {
    let (nodes, matrix) = to_matrix(relation);
    reduce(&matrix)
        .into_iter()
        .map(|(i, j)| (nodes[i].clone(), nodes[j].clone()))
        .collect()
}

fn to_matrix<T: Ord + Clone>(relation: &BTreeSet<(T, T)>) -> (Vec<T>, BitMatrix) {
    let nodes: Vec<T> = relation
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pos: BTreeMap<&T, usize> = nodes.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut m = BitMatrix::new(nodes.len());
    for (a, b) in relation {
        if a != b {
            m.set(pos[a], pos[b]);
        }
    }
    (nodes, m)
}

/// Reduction over matrix indices; the result is sorted.
pub(crate) fn reduce(matrix: &BitMatrix) -> Vec<(usize, usize)> {
    let n = matrix.size();
    let mut reach = matrix.clone();
    for i in 0..n {
        reach.unset(i, i);
    }
    reach.close_transitively();

    let mut component = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut out = Vec::new();
    for i in 0..n {
        if component[i] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(i);
        component[i] = c;
        let mut members = vec![i];
        for (j, comp) in component.iter_mut().enumerate().skip(i + 1) {
            if reach.get(i, j) && reach.get(j, i) {
                *comp = c;
                members.push(j);
            }
        }
        if members.len() > 1 {
            for w in members.windows(2) {
                out.push((w[0], w[1]));
            }
            out.push((members[members.len() - 1], members[0]));
        }
    }

    for (cu, &u) in reps.iter().enumerate() {
        for (cv, &v) in reps.iter().enumerate() {
            if cu == cv || !reach.get(u, v) {
                continue;
            }
            let implied = reps
                .iter()
                .enumerate()
                .any(|(cw, &w)| cw != cu && cw != cv && reach.get(u, w) && reach.get(w, v));
            if !implied {
                out.push((u, v));
            }
        }
    }
    out.sort_unstable();
    out
}
