//! Arborescences as partial maps vertex → outgoing edge.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::graph::{DirectedMultigraph, EdgeId, VertexId};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Arborescence {
    out: BTreeMap<VertexId, EdgeId>,
}

impl Arborescence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Keys every edge by its base tail.
    pub fn from_edges(graph: &DirectedMultigraph, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        Arborescence {
            out: edges.into_iter().map(|e| (graph.tail(e), e)).collect(),
        }
    }

    pub fn insert(&mut self, v: VertexId, e: EdgeId) -> Option<EdgeId> {
        self.out.insert(v, e)
    }

    pub fn remove(&mut self, v: VertexId) -> Option<EdgeId> {
        self.out.remove(&v)
    }

    pub fn get(&self, v: VertexId) -> Option<EdgeId> {
        self.out.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.out.iter().map(|(v, e)| (*v, *e))
    }

    /// Edge set in increasing id order.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut v: Vec<EdgeId> = self.out.values().copied().collect();
        v.sort();
        v
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.out.values().any(|f| *f == e)
    }

    pub fn is_subset_of(&self, other: &Arborescence) -> bool {
        self.out.iter().all(|(v, e)| other.out.get(v) == Some(e))
    }

    /// Future 𝔉_T(v) as the vertex sequence v, head, head of head, … up to
    /// the first vertex without an outgoing edge. Stops early on a cycle.
    pub fn future(&self, graph: &DirectedMultigraph, v: VertexId) -> Vec<VertexId> {
        let mut seen = HashSet::new();
        let mut path = vec![v];
        let mut x = v;
        seen.insert(v);
        while let Some(e) = self.get(x) {
            x = graph.head(e);
            if !seen.insert(x) {
                break;
            }
            path.push(x);
        }
        path
    }

    /// Edges of the future of `v`.
    pub fn future_edges(&self, graph: &DirectedMultigraph, v: VertexId) -> Vec<EdgeId> {
        let verts = self.future(graph, v);
        verts[..verts.len() - 1]
            .iter()
            .map(|x| self.get(*x).expect("future vertex has an edge"))
            .collect()
    }

    /// u ∧ v: the first vertex of 𝔉(v) that also lies on 𝔉(u).
    pub fn merge_point(
        &self,
        graph: &DirectedMultigraph,
        u: VertexId,
        v: VertexId,
    ) -> Option<VertexId> {
        let fu: HashSet<VertexId> = self.future(graph, u).into_iter().collect();
        self.future(graph, v).into_iter().find(|x| fu.contains(x))
    }

    /// Sorted edge labels, used as a stable signature in reports.
    pub fn signature(&self, graph: &DirectedMultigraph) -> Vec<u64> {
        let mut s: Vec<u64> = self.out.values().map(|e| graph.edge_label(*e)).collect();
        s.sort();
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Ok,
    TailMismatch { vertex: VertexId, edge: EdgeId },
    CycleViolation { vertex: VertexId },
    NotSpanning { vertex: VertexId },
    BoundaryHasEdge { vertex: VertexId },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

/// Checks `arb` against the base graph. With `spanning`, every non-boundary
/// vertex must have exactly one outgoing edge and boundary vertices none.
pub fn validate_arborescence(
    graph: &DirectedMultigraph,
    arb: &Arborescence,
    spanning: bool,
) -> Verdict {
    for (v, e) in arb.iter() {
        if e.idx() >= graph.num_edges() || graph.tail(e) != v {
            return Verdict::TailMismatch { vertex: v, edge: e };
        }
        if graph.is_boundary(v) {
            return Verdict::BoundaryHasEdge { vertex: v };
        }
    }
    if spanning {
        if let Some(v) = graph.interior().find(|v| arb.get(*v).is_none()) {
            return Verdict::NotSpanning { vertex: v };
        }
    }
    // 0 = unvisited, 1 = on the current walk, 2 = known to terminate
    let mut state = vec![0u8; graph.num_vertices()];
    for (start, _) in arb.iter() {
        let mut walk = Vec::new();
        let mut x = start;
        loop {
            match state[x.idx()] {
                2 => break,
                1 => return Verdict::CycleViolation { vertex: x },
                _ => {}
            }
            state[x.idx()] = 1;
            walk.push(x);
            match arb.get(x) {
                Some(e) => x = graph.head(e),
                None => break,
            }
        }
        for w in walk {
            state[w.idx()] = 2;
        }
    }
    Verdict::Ok
}

/// One bit per pair: whether the futures of u and v merge before reaching
/// the boundary (u ∧ v ≠ ∂).
pub fn connectivity_profile(
    graph: &DirectedMultigraph,
    msa: &Arborescence,
    pairs: &[(VertexId, VertexId)],
) -> Vec<bool> {
    pairs
        .iter()
        .map(|&(u, v)| matches!(msa.merge_point(graph, u, v), Some(m) if !graph.is_boundary(m)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    // star: 0,1,2 → 3 (∂), plus 0→1
    fn star() -> DirectedMultigraph {
        build_graph(&[0, 1, 2, 3], &[3], &[(0, 3), (1, 3), (2, 3), (0, 1)]).unwrap()
    }

    #[test]
    fn star_is_valid() {
        let g = star();
        let t = Arborescence::from_edges(&g, [EdgeId(0), EdgeId(1), EdgeId(2)]);
        assert_eq!(validate_arborescence(&g, &t, true), Verdict::Ok);
    }

    #[test]
    fn detects_cycle_and_missing_edge() {
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (0, 2)]).unwrap();
        let cyc = Arborescence::from_edges(&g, [EdgeId(0), EdgeId(1)]);
        assert!(matches!(
            validate_arborescence(&g, &cyc, true),
            Verdict::CycleViolation { .. }
        ));
        let partial = Arborescence::from_edges(&g, [EdgeId(2)]);
        assert_eq!(
            validate_arborescence(&g, &partial, true),
            Verdict::NotSpanning {
                vertex: VertexId(1)
            }
        );
        assert_eq!(validate_arborescence(&g, &partial, false), Verdict::Ok);
    }

    #[test]
    fn profile_bits() {
        let g = star();
        let t = Arborescence::from_edges(&g, [EdgeId(3), EdgeId(1), EdgeId(2)]);
        let bits = connectivity_profile(
            &g,
            &t,
            &[(VertexId(0), VertexId(1)), (VertexId(1), VertexId(2))],
        );
        assert_eq!(bits, vec![true, false]);
    }
}
