//! Directed multigraphs with a boundary set.
//!
//! Vertices and edges carry two identities: a dense index ([`VertexId`],
//! [`EdgeId`]) used by every algorithm, and a `u64` label that is stable
//! across files and across the radii of a graph family.

pub(crate) mod contraction;
mod io;

pub use contraction::{ContractionError, ContractionRecord, ContractionStack};
pub use io::{load_graph, parse_graph, save_graph, GraphFile, GraphFileEdge};

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl VertexId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {0} is a self-loop")]
    SelfLoop(u64),
    #[error("unknown vertex {0}")]
    UnknownVertex(u64),
    #[error("boundary set is empty")]
    EmptyBoundary,
    #[error("vertex {0} listed twice")]
    DuplicateVertex(u64),
    #[error("edge id {0} listed twice")]
    DuplicateEdgeId(u64),
    #[error("kept vertex set is empty or does not induce a connected subgraph")]
    DisconnectedKeptSet,
    #[error("malformed graph file: {0}")]
    Format(String),
}

/// Label given to the boundary vertex created by [`wire_boundary`].
pub const WIRED_BOUNDARY_LABEL: u64 = u64::MAX;

#[derive(Clone, Debug, Default)]
pub struct DirectedMultigraph {
    vertex_labels: Vec<u64>,
    vertex_index: HashMap<u64, VertexId>,
    is_boundary: Vec<bool>,
    boundary: Vec<VertexId>,
    edges: Vec<Edge>,
    edge_labels: Vec<u64>,
    edge_index: HashMap<u64, EdgeId>,
    out: Vec<Vec<EdgeId>>,
}

impl DirectedMultigraph {
    pub fn num_vertices(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_labels.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn interior(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |v| !self.is_boundary(*v))
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    #[inline]
    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.is_boundary[v.idx()]
    }

    #[inline]
    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e.idx()]
    }

    #[inline]
    pub fn tail(&self, e: EdgeId) -> VertexId {
        self.edges[e.idx()].tail
    }

    #[inline]
    pub fn head(&self, e: EdgeId) -> VertexId {
        self.edges[e.idx()].head
    }

    /// Outgoing edges 𝒪(v).
    #[inline]
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v.idx()]
    }

    pub fn vertex_label(&self, v: VertexId) -> u64 {
        self.vertex_labels[v.idx()]
    }

    pub fn edge_label(&self, e: EdgeId) -> u64 {
        self.edge_labels[e.idx()]
    }

    pub fn vertex_by_label(&self, label: u64) -> Option<VertexId> {
        self.vertex_index.get(&label).copied()
    }

    pub fn edge_by_label(&self, label: u64) -> Option<EdgeId> {
        self.edge_index.get(&label).copied()
    }

    pub fn edge_labels(&self) -> &[u64] {
        &self.edge_labels
    }
}

/// Incremental construction of a [`DirectedMultigraph`] from labels.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    g: DirectedMultigraph,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: u64, boundary: bool) -> Result<VertexId, GraphError> {
        if self.g.vertex_index.contains_key(&label) {
            return Err(GraphError::DuplicateVertex(label));
        }
        let v = VertexId(self.g.vertex_labels.len() as u32);
        self.g.vertex_labels.push(label);
        self.g.vertex_index.insert(label, v);
        self.g.is_boundary.push(boundary);
        if boundary {
            self.g.boundary.push(v);
        }
        self.g.out.push(Vec::new());
        Ok(v)
    }

    pub fn set_boundary(&mut self, label: u64) -> Result<(), GraphError> {
        let v = *self
            .g
            .vertex_index
            .get(&label)
            .ok_or(GraphError::UnknownVertex(label))?;
        if !self.g.is_boundary[v.idx()] {
            self.g.is_boundary[v.idx()] = true;
            self.g.boundary.push(v);
            self.g.boundary.sort();
        }
        Ok(())
    }

    pub fn add_edge(&mut self, label: u64, tail: u64, head: u64) -> Result<EdgeId, GraphError> {
        let t = *self
            .g
            .vertex_index
            .get(&tail)
            .ok_or(GraphError::UnknownVertex(tail))?;
        let h = *self
            .g
            .vertex_index
            .get(&head)
            .ok_or(GraphError::UnknownVertex(head))?;
        self.add_edge_ids(label, t, h)
    }

    pub fn add_edge_ids(
        &mut self,
        label: u64,
        tail: VertexId,
        head: VertexId,
    ) -> Result<EdgeId, GraphError> {
        if tail == head {
            return Err(GraphError::SelfLoop(label));
        }
        if self.g.edge_index.contains_key(&label) {
            return Err(GraphError::DuplicateEdgeId(label));
        }
        let e = EdgeId(self.g.edges.len() as u32);
        self.g.edges.push(Edge { tail, head });
        self.g.edge_labels.push(label);
        self.g.edge_index.insert(label, e);
        self.g.out[tail.idx()].push(e);
        Ok(e)
    }

    /// Finishes a graph that will serve as an MSA instance.
    pub fn build(self) -> Result<DirectedMultigraph, GraphError> {
        if self.g.boundary.is_empty() {
            return Err(GraphError::EmptyBoundary);
        }
        Ok(self.g)
    }

    /// Finishes a graph that may have no boundary at all.
    pub fn build_unrooted(self) -> DirectedMultigraph {
        self.g
    }
}

/// Builds a graph with EdgeIds assigned in input order; edge labels are the
/// input positions.
pub fn build_graph(
    vertices: &[u64],
    boundary: &[u64],
    edges: &[(u64, u64)],
) -> Result<DirectedMultigraph, GraphError> {
    let mut b = GraphBuilder::new();
    for &v in vertices {
        b.add_vertex(v, false)?;
    }
    for &v in boundary {
        b.set_boundary(v)?;
    }
    for (i, &(t, h)) in edges.iter().enumerate() {
        b.add_edge(i as u64, t, h)?;
    }
    b.build()
}

/// Bidirected graph on `n` vertices labelled `0..n`, no boundary. Unoriented
/// edge `i` becomes the pair `2i` (a→b) and `2i+1` (b→a).
pub fn bidirected(n: usize, edges: &[(u64, u64)]) -> Result<DirectedMultigraph, GraphError> {
    let mut b = GraphBuilder::new();
    for v in 0..n as u64 {
        b.add_vertex(v, false)?;
    }
    for (i, &(x, y)) in edges.iter().enumerate() {
        b.add_edge(2 * i as u64, x, y)?;
        b.add_edge(2 * i as u64 + 1, y, x)?;
    }
    Ok(b.build_unrooted())
}

fn induces_connected(graph: &DirectedMultigraph, keep: &[bool], start: VertexId) -> bool {
    let mut undirected: Vec<Vec<VertexId>> = vec![Vec::new(); graph.num_vertices()];
    for e in graph.edge_ids() {
        let Edge { tail, head } = graph.edge(e);
        if keep[tail.idx()] && keep[head.idx()] {
            undirected[tail.idx()].push(head);
            undirected[head.idx()].push(tail);
        }
    }
    let mut seen = vec![false; graph.num_vertices()];
    let mut queue = VecDeque::from([start]);
    seen[start.idx()] = true;
    let mut count = 1usize;
    while let Some(v) = queue.pop_front() {
        for &w in &undirected[v.idx()] {
            if !seen[w.idx()] {
                seen[w.idx()] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == keep.iter().filter(|k| **k).count()
}

/// The wired graph G^w: every vertex outside `kept` is identified into one
/// boundary vertex (label [`WIRED_BOUNDARY_LABEL`]); edges that would become
/// self-loops are dropped. Edge labels are preserved.
pub fn wire_boundary(
    graph: &DirectedMultigraph,
    kept: &[VertexId],
) -> Result<DirectedMultigraph, GraphError> {
    let Some(&first) = kept.first() else {
        return Err(GraphError::DisconnectedKeptSet);
    };
    let mut keep = vec![false; graph.num_vertices()];
    for &v in kept {
        keep[v.idx()] = true;
    }
    if !induces_connected(graph, &keep, first) {
        return Err(GraphError::DisconnectedKeptSet);
    }
    if keep.iter().all(|k| *k) {
        return Ok(graph.clone());
    }
    let mut b = GraphBuilder::new();
    let mut map = vec![None; graph.num_vertices()];
    let mut sorted: Vec<VertexId> = kept
        .iter()
        .copied()
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    sorted.sort();
    for v in sorted {
        map[v.idx()] = Some(b.add_vertex(graph.vertex_label(v), graph.is_boundary(v))?);
    }
    let wired = b.add_vertex(WIRED_BOUNDARY_LABEL, true)?;
    for e in graph.edge_ids() {
        let Edge { tail, head } = graph.edge(e);
        let t = map[tail.idx()].unwrap_or(wired);
        let h = map[head.idx()].unwrap_or(wired);
        if t != h {
            b.add_edge_ids(graph.edge_label(e), t, h)?;
        }
    }
    Ok(b.build_unrooted())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance() {
        let g = build_graph(&[0, 1], &[1], &[(0, 1)]).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.boundary(), &[VertexId(1)]);
    }

    #[test]
    fn parallel_edges_get_distinct_ids() {
        let g = build_graph(&[0, 1], &[1], &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(g.out_edges(VertexId(0)), &[EdgeId(0), EdgeId(1)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            build_graph(&[0, 1], &[1], &[(0, 0)]).unwrap_err(),
            GraphError::SelfLoop(0)
        );
        assert_eq!(
            build_graph(&[0, 1], &[1], &[(0, 5)]).unwrap_err(),
            GraphError::UnknownVertex(5)
        );
        assert_eq!(
            build_graph(&[0, 1], &[], &[(0, 1)]).unwrap_err(),
            GraphError::EmptyBoundary
        );
        assert_eq!(
            build_graph(&[0, 1], &[7], &[]).unwrap_err(),
            GraphError::UnknownVertex(7)
        );
    }

    #[test]
    fn wiring_a_path() {
        // path 0-1-2-3 in both orientations
        let g = bidirected(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let w = wire_boundary(&g, &[VertexId(1), VertexId(2)]).unwrap();
        assert_eq!(w.num_vertices(), 3);
        assert_eq!(w.num_edges(), 6);
        let d = w.vertex_by_label(WIRED_BOUNDARY_LABEL).unwrap();
        assert!(w.is_boundary(d));
        assert!(matches!(
            wire_boundary(&g, &[VertexId(0), VertexId(3)]),
            Err(GraphError::DisconnectedKeptSet)
        ));
    }

    #[test]
    fn wiring_everything_is_identity() {
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 2), (1, 0)]).unwrap();
        let all: Vec<_> = g.vertices().collect();
        let w = wire_boundary(&g, &all).unwrap();
        assert_eq!(w.num_edges(), g.num_edges());
        assert_eq!(w.boundary(), g.boundary());
    }
}
