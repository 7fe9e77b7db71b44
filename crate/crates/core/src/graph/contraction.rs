//! Cycle contraction over a fixed base graph.
//!
//! Supervertices live in the same id space as base vertices: ids below
//! `base.num_vertices()` are base vertices, later ids are created by
//! contractions and never reused. Each id points to the supervertex that
//! absorbed it (itself while it is on top). Edges never change identity;
//! their current endpoints are resolved through this forest.

use std::cell::Cell;

use thiserror::Error;

use super::{DirectedMultigraph, EdgeId, VertexId};
use crate::arborescence::Arborescence;

const LIVE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionRecord {
    /// Cycle edges in traversal order; the tail of `cycle[i]` resolved to `absorbed[i]`.
    pub cycle: Vec<EdgeId>,
    pub supervertex: VertexId,
    pub absorbed: Vec<VertexId>,
    /// Edges with both endpoints inside the cycle, including the cycle itself.
    pub removed: Vec<EdgeId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContractionError {
    #[error("edges do not form a directed cycle in the current view")]
    NotACycle,
    #[error("cycle passes through a boundary vertex")]
    TouchesBoundary,
    #[error("record {0} is not the topmost record")]
    RecordNotTop(usize),
    #[error("arborescence is not spanning for the contracted view")]
    NotSpanning,
}

#[derive(Debug)]
pub struct ContractionStack<'g> {
    base: &'g DirectedMultigraph,
    parent: Vec<u32>,
    jump: Vec<Cell<u32>>,
    exists: Vec<bool>,
    out: Vec<Vec<EdgeId>>,
    dead_at: Vec<u32>,
    records: Vec<ContractionRecord>,
    live_vertices: usize,
    mark: Vec<u32>,
    mark_gen: u32,
}

impl<'g> ContractionStack<'g> {
    pub fn new(base: &'g DirectedMultigraph) -> Self {
        let n = base.num_vertices();
        ContractionStack {
            base,
            parent: (0..n as u32).collect(),
            jump: (0..n as u32).map(Cell::new).collect(),
            exists: vec![true; n],
            out: base
                .vertices()
                .map(|v| base.out_edges(v).to_vec())
                .collect(),
            dead_at: vec![LIVE; base.num_edges()],
            records: Vec::new(),
            live_vertices: n,
            mark: vec![0; n],
            mark_gen: 0,
        }
    }

    pub fn base(&self) -> &'g DirectedMultigraph {
        self.base
    }

    pub fn records(&self) -> &[ContractionRecord] {
        &self.records
    }

    pub fn record(&self, i: usize) -> &ContractionRecord {
        &self.records[i]
    }

    /// Number of supervertex ids ever issued.
    pub fn id_bound(&self) -> usize {
        self.parent.len()
    }

    /// Number of vertices in the current view.
    pub fn live_vertex_count(&self) -> usize {
        self.live_vertices
    }

    /// Top-level supervertex currently containing `v`.
    pub fn find(&self, v: VertexId) -> VertexId {
        let mut x = v.0;
        loop {
            let j = self.jump[x as usize].get();
            if j != x && self.exists[j as usize] {
                x = j;
                continue;
            }
            let p = self.parent[x as usize];
            if p == x {
                break;
            }
            x = p;
        }
        if x != v.0 {
            self.jump[v.idx()].set(x);
        }
        VertexId(x)
    }

    #[inline]
    pub fn tail(&self, e: EdgeId) -> VertexId {
        self.find(self.base.tail(e))
    }

    #[inline]
    pub fn head(&self, e: EdgeId) -> VertexId {
        self.find(self.base.head(e))
    }

    #[inline]
    pub fn is_live_edge(&self, e: EdgeId) -> bool {
        self.dead_at[e.idx()] == LIVE
    }

    /// Index of the record that removed `e`, if it is dead.
    pub fn removed_by(&self, e: EdgeId) -> Option<usize> {
        let d = self.dead_at[e.idx()];
        (d != LIVE).then_some(d as usize)
    }

    pub fn is_live_vertex(&self, s: VertexId) -> bool {
        self.exists[s.idx()] && self.parent[s.idx()] == s.0
    }

    /// Base boundary vertices are never contracted, so they are their own supervertex.
    pub fn is_boundary(&self, s: VertexId) -> bool {
        s.idx() < self.base.num_vertices() && self.base.is_boundary(s)
    }

    /// Live outgoing edges of a live supervertex. For an absorbed supervertex
    /// this is its list from the moment it was absorbed.
    pub fn out_edges(&self, s: VertexId) -> &[EdgeId] {
        &self.out[s.idx()]
    }

    /// Live supervertices of the current view, in increasing id order.
    pub fn live_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.parent.len() as u32)
            .map(VertexId)
            .filter(move |s| self.is_live_vertex(*s))
    }

    /// The direct child of `s` whose subtree contains the base vertex `v`.
    pub fn child_toward(&self, s: VertexId, v: VertexId) -> VertexId {
        let mut x = v.0;
        while self.parent[x as usize] != s.0 {
            let p = self.parent[x as usize];
            assert_ne!(p, x, "{v} is not inside {s}");
            x = p;
        }
        VertexId(x)
    }

    /// Base vertices contained in supervertex `s`.
    pub fn members(&self, s: VertexId) -> Vec<VertexId> {
        self.base
            .vertices()
            .filter(|v| self.find(*v) == s)
            .collect()
    }

    fn next_mark(&mut self) -> u32 {
        self.mark_gen = self.mark_gen.wrapping_add(1);
        if self.mark_gen == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.mark_gen = 1;
        }
        self.mark_gen
    }

    /// Contracts `cycle` into a fresh supervertex and returns the record index.
    pub fn contract(&mut self, cycle: &[EdgeId]) -> Result<usize, ContractionError> {
        if cycle.len() < 2 {
            return Err(ContractionError::NotACycle);
        }
        let mut absorbed = Vec::with_capacity(cycle.len());
        for (i, &e) in cycle.iter().enumerate() {
            if !self.is_live_edge(e) {
                return Err(ContractionError::NotACycle);
            }
            let next = cycle[(i + 1) % cycle.len()];
            if self.head(e) != self.tail(next) {
                return Err(ContractionError::NotACycle);
            }
            absorbed.push(self.tail(e));
        }
        if absorbed.iter().any(|s| self.is_boundary(*s)) {
            return Err(ContractionError::TouchesBoundary);
        }
        let gen = self.next_mark();
        for s in &absorbed {
            if self.mark[s.idx()] == gen {
                return Err(ContractionError::NotACycle);
            }
            self.mark[s.idx()] = gen;
        }

        let s = VertexId(self.parent.len() as u32);
        let rec_index = self.records.len() as u32;
        let mut out = Vec::new();
        let mut removed = Vec::new();
        for m in &absorbed {
            for &e in &self.out[m.idx()] {
                let h = self.find(self.base.head(e));
                if self.mark[h.idx()] == gen {
                    removed.push(e);
                } else {
                    out.push(e);
                }
            }
        }
        for &e in &removed {
            self.dead_at[e.idx()] = rec_index;
        }
        self.parent.push(s.0);
        self.jump.push(Cell::new(s.0));
        self.exists.push(true);
        self.mark.push(0);
        self.out.push(out);
        for m in &absorbed {
            self.parent[m.idx()] = s.0;
        }
        self.live_vertices = self.live_vertices + 1 - absorbed.len();
        self.records.push(ContractionRecord {
            cycle: cycle.to_vec(),
            supervertex: s,
            absorbed,
            removed,
        });
        Ok(rec_index as usize)
    }

    /// Pops the top record, turning a spanning arborescence of the contracted
    /// view into one of the view before the contraction: T = T★ \ e_C.
    pub fn uncontract(
        &mut self,
        record: usize,
        arb: &mut Arborescence,
    ) -> Result<(), ContractionError> {
        if record + 1 != self.records.len() {
            return Err(ContractionError::RecordNotTop(record));
        }
        let rec = self.records.pop().expect("checked above");
        let s = rec.supervertex;
        let expanded = expand(self.base, &rec, arb, |v| self.child_toward(s, v));
        if let Err(err) = expanded {
            self.records.push(rec);
            return Err(err);
        }
        for m in &rec.absorbed {
            self.parent[m.idx()] = m.0;
        }
        for e in &rec.removed {
            self.dead_at[e.idx()] = LIVE;
        }
        self.exists[s.idx()] = false;
        self.live_vertices = self.live_vertices + rec.absorbed.len() - 1;
        Ok(())
    }

    /// Pops every record, expanding `arb` to a spanning arborescence of the base graph.
    pub fn uncontract_all(&mut self, arb: &mut Arborescence) -> Result<(), ContractionError> {
        while !self.records.is_empty() {
            self.uncontract(self.records.len() - 1, arb)?;
        }
        Ok(())
    }

    /// F ∩ E′: the edges of `f` still alive in the current view.
    pub fn project_edge_set(&self, f: &[EdgeId]) -> Vec<EdgeId> {
        f.iter()
            .copied()
            .filter(|e| self.is_live_edge(*e))
            .collect()
    }
}

/// Replaces the entry of `rec.supervertex` in `arb` by the cycle minus the
/// cycle edge leaving the member that already has an outgoing edge.
/// `child_toward` maps a base vertex inside the supervertex to the absorbed
/// member containing it.
pub(crate) fn expand(
    base: &DirectedMultigraph,
    rec: &ContractionRecord,
    arb: &mut Arborescence,
    child_toward: impl Fn(VertexId) -> VertexId,
) -> Result<(), ContractionError> {
    let e = arb
        .remove(rec.supervertex)
        .ok_or(ContractionError::NotSpanning)?;
    let entry = child_toward(base.tail(e));
    arb.insert(entry, e);
    for (c, m) in rec.cycle.iter().zip(&rec.absorbed) {
        if *m != entry {
            arb.insert(*m, *c);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    // a=0, b=1, c=2, ∂=3; edges a→b, b→c, c→a, a→∂
    fn triangle() -> DirectedMultigraph {
        build_graph(&[0, 1, 2, 3], &[3], &[(0, 1), (1, 2), (2, 0), (0, 3)]).unwrap()
    }

    #[test]
    fn contracting_a_triangle() {
        let g = triangle();
        let mut st = ContractionStack::new(&g);
        let r = st.contract(&[EdgeId(0), EdgeId(1), EdgeId(2)]).unwrap();
        assert_eq!(st.live_vertex_count(), 2);
        let s = st.record(r).supervertex;
        assert_eq!(st.tail(EdgeId(3)), s);
        assert_eq!(st.head(EdgeId(3)), VertexId(3));
        assert_eq!(st.out_edges(s), &[EdgeId(3)]);
        assert_eq!(
            st.project_edge_set(&[EdgeId(0), EdgeId(3)]),
            vec![EdgeId(3)]
        );
        assert_eq!(
            st.project_edge_set(&[EdgeId(0), EdgeId(1), EdgeId(2)]),
            vec![]
        );
    }

    #[test]
    fn two_cycle_keeps_parallel_exits() {
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (0, 2), (1, 2)]).unwrap();
        let mut st = ContractionStack::new(&g);
        st.contract(&[EdgeId(0), EdgeId(1)]).unwrap();
        let s = st.find(VertexId(0));
        assert_eq!(st.out_edges(s), &[EdgeId(2), EdgeId(3)]);

        let mut arb = Arborescence::new();
        arb.insert(s, EdgeId(3));
        st.uncontract(0, &mut arb).unwrap();
        assert_eq!(arb.edges(), vec![EdgeId(0), EdgeId(3)]);
        assert_eq!(st.live_vertex_count(), 3);
        assert!(st.is_live_edge(EdgeId(1)));
    }

    #[test]
    fn rejects_non_cycles() {
        let g = triangle();
        let mut st = ContractionStack::new(&g);
        assert_eq!(
            st.contract(&[EdgeId(0), EdgeId(2)]),
            Err(ContractionError::NotACycle)
        );
        let g2 = build_graph(&[0, 1], &[1], &[(0, 1), (1, 0)]).unwrap();
        let mut st2 = ContractionStack::new(&g2);
        assert_eq!(
            st2.contract(&[EdgeId(0), EdgeId(1)]),
            Err(ContractionError::TouchesBoundary)
        );
    }

    #[test]
    fn nested_contractions_resolve_and_unwind() {
        // 0⇄1, then {0,1}⇄2, exit 2→3
        let g = build_graph(
            &[0, 1, 2, 3],
            &[3],
            &[(0, 1), (1, 0), (1, 2), (2, 0), (2, 3)],
        )
        .unwrap();
        let mut st = ContractionStack::new(&g);
        st.contract(&[EdgeId(0), EdgeId(1)]).unwrap();
        st.contract(&[EdgeId(2), EdgeId(3)]).unwrap();
        let top = st.find(VertexId(0));
        assert_eq!(st.find(VertexId(2)), top);
        assert_eq!(st.live_vertex_count(), 2);
        let mut arb = Arborescence::new();
        arb.insert(top, EdgeId(4));
        assert_eq!(
            st.uncontract(0, &mut arb),
            Err(ContractionError::RecordNotTop(0))
        );
        st.uncontract_all(&mut arb).unwrap();
        assert_eq!(arb.edges(), vec![EdgeId(0), EdgeId(2), EdgeId(4)]);
        // the resolver forgets popped supervertices
        assert_eq!(st.find(VertexId(0)), VertexId(0));
        // fresh ids are not reused after popping
        st.contract(&[EdgeId(0), EdgeId(1)]).unwrap();
        assert_eq!(st.find(VertexId(1)), VertexId(6));
    }
}
