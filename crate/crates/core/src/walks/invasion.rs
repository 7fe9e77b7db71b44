//! Invasion percolation and its identification with the CLEB walk on
//! symmetric weights.
//!
//! Undirected graphs are bidirected graphs whose edge labels pair up as
//! `2i, 2i+1`: both orientations of unoriented edge `i`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cleb::cleb_walk;
use crate::graph::{DirectedMultigraph, EdgeId, VertexId};
use crate::scalar::{Scalar, TIE_TOLERANCE};
use crate::weights::WeightAssignment;

use super::WalkError;

pub fn unoriented_id(graph: &DirectedMultigraph, e: EdgeId) -> u64 {
    graph.edge_label(e) >> 1
}

fn check_symmetric(graph: &DirectedMultigraph, weights: &[f64]) -> Result<(), WalkError> {
    for e in graph.edge_ids() {
        match graph.edge_by_label(graph.edge_label(e) ^ 1) {
            Some(r) if weights[r.idx()] == weights[e.idx()] => {}
            _ => return Err(WalkError::NotSymmetric(e)),
        }
    }
    Ok(())
}

/// T_1 ⊂ T_2 ⊂ …, recorded as the unoriented edge added at each step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvasionSequence {
    pub start: VertexId,
    pub edges: Vec<u64>,
}

impl InvasionSequence {
    /// T_k as a set of unoriented ids.
    pub fn tree(&self, k: usize) -> BTreeSet<u64> {
        self.edges[..k].iter().copied().collect()
    }
}

/// Grows a tree from `start`, always adding the lightest edge leaving it.
pub fn invasion_percolation(
    graph: &DirectedMultigraph,
    weights: &[f64],
    start: VertexId,
) -> Result<InvasionSequence, WalkError> {
    check_symmetric(graph, weights)?;
    let mut in_tree = vec![false; graph.num_vertices()];
    in_tree[start.idx()] = true;
    let mut members = vec![start];
    let mut edges = Vec::new();
    loop {
        let mut best: Option<EdgeId> = None;
        let mut second: Option<EdgeId> = None;
        for &v in &members {
            for &e in graph.out_edges(v) {
                if in_tree[graph.head(e).idx()] {
                    continue;
                }
                let w = weights[e.idx()];
                match best {
                    Some(b) if w >= weights[b.idx()] => {
                        if second.is_none_or(|s| w < weights[s.idx()]) {
                            second = Some(e);
                        }
                    }
                    _ => {
                        second = best;
                        best = Some(e);
                    }
                }
            }
        }
        let Some(b) = best else { break };
        if let Some(s) = second {
            if weights[b.idx()].ties_with(&weights[s.idx()], TIE_TOLERANCE) {
                return Err(WalkError::TieDetected(
                    unoriented_id(graph, b),
                    unoriented_id(graph, s),
                ));
            }
        }
        let h = graph.head(b);
        in_tree[h.idx()] = true;
        members.push(h);
        edges.push(unoriented_id(graph, b));
    }
    Ok(InvasionSequence { start, edges })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvasionVerdict {
    pub invasion: Vec<u64>,
    /// Unoriented ids of the CLEB walk's fresh exposures, in order.
    pub walk: Vec<u64>,
    pub equal: bool,
}

/// Runs the CLEB walk from `start` on the bidirected graph with no boundary
/// until nothing is left to expose. τ_k is the k-th time an edge is exposed
/// whose reversal was not exposed before; the unoriented exposed set at τ_k
/// is compared with T_k.
pub fn invasion_equivalence_check(
    graph: &DirectedMultigraph,
    weights: &[f64],
    start: VertexId,
) -> Result<InvasionVerdict, WalkError> {
    let invasion = invasion_percolation(graph, weights, start)?;
    let rec = cleb_walk(
        graph,
        WeightAssignment::new(weights.to_vec()),
        start,
        u64::MAX,
    )?;
    let mut seen = BTreeSet::new();
    let mut walk = Vec::new();
    let mut equal = true;
    for &e in &rec.exposed {
        let id = unoriented_id(graph, e);
        if seen.insert(id) {
            walk.push(id);
            let k = walk.len();
            equal &= k <= invasion.edges.len() && seen == invasion.tree(k);
        }
    }
    equal &= walk.len() == invasion.edges.len();
    Ok(InvasionVerdict {
        invasion: invasion.edges,
        walk,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bidirected;

    fn sym(w: &[f64]) -> Vec<f64> {
        w.iter().flat_map(|x| [*x, *x]).collect()
    }

    #[test]
    fn lighter_edge_first() {
        let g = bidirected(3, &[(0, 1), (0, 2)]).unwrap();
        let seq = invasion_percolation(&g, &sym(&[0.7, 0.2]), VertexId(0)).unwrap();
        assert_eq!(seq.edges, vec![1, 0]);
    }

    #[test]
    fn increasing_path_is_invaded_in_order() {
        let g = bidirected(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let w = sym(&[0.1, 0.2, 0.3]);
        assert_eq!(
            invasion_percolation(&g, &w, VertexId(0)).unwrap().edges,
            vec![0, 1, 2]
        );
        assert!(
            invasion_equivalence_check(&g, &w, VertexId(0))
                .unwrap()
                .equal
        );
    }

    #[test]
    fn asymmetric_weights_rejected() {
        let g = bidirected(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            invasion_percolation(&g, &[0.1, 0.2], VertexId(0)),
            Err(WalkError::NotSymmetric(_))
        ));
    }
}
