//! The loop-contracting random walk on a union-find view of the graph.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng as _;
use serde::Serialize;

use crate::cleb::{cleb_walk, ClebError, WalkStatus};
use crate::graph::{DirectedMultigraph, EdgeId, VertexId};
use crate::seed::{self, Rng};
use crate::weights::{sample_edge, WeightAssignment};

use super::{par_chunks, WalkError};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LcrwEvent {
    Extend,
    /// The chosen edge closed a cycle with this many edges.
    Contract(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LcrwStep {
    pub edge: EdgeId,
    pub event: LcrwEvent,
    /// |P_i| after the step.
    pub path_len: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LcrwTrace {
    pub start: VertexId,
    pub steps: Vec<LcrwStep>,
    pub status: WalkStatus,
    /// Whether the walk was stopped at its first return to the start.
    pub returned: bool,
}

impl LcrwTrace {
    pub fn exposed(&self) -> Vec<EdgeId> {
        self.steps.iter().map(|s| s.edge).collect()
    }

    pub fn returns_to_empty(&self) -> usize {
        self.steps.iter().filter(|s| s.path_len == 0).count()
    }

    pub fn max_path_len(&self) -> u32 {
        self.steps.iter().map(|s| s.path_len).max().unwrap_or(0)
    }

    /// CSV with columns `step,event,path_len,cycle_len`; when `site` is given
    /// two more columns `x,y` locate the head of each step's edge.
    pub fn to_csv(
        &self,
        graph: &DirectedMultigraph,
        site: Option<&dyn Fn(VertexId) -> (i64, i64)>,
    ) -> String {
        let mut out = String::from("step,event,path_len,cycle_len");
        if site.is_some() {
            out.push_str(",x,y");
        }
        out.push('\n');
        for (i, s) in self.steps.iter().enumerate() {
            let (event, cycle) = match s.event {
                LcrwEvent::Extend => ("extend", 0),
                LcrwEvent::Contract(k) => ("contract", k),
            };
            let _ = write!(out, "{},{},{},{}", i + 1, event, s.path_len, cycle);
            if let Some(f) = site {
                let (x, y) = f(graph.head(s.edge));
                let _ = write!(out, ",{x},{y}");
            }
            out.push('\n');
        }
        out
    }
}

/// Reusable LCRW state. Vertices are merged in a union-find whose roots own
/// the out-lists; edges made internal by a merge are dropped lazily when
/// drawn.
pub struct Lcrw<'g> {
    graph: &'g DirectedMultigraph,
    parent: Vec<u32>,
    out: Vec<Vec<EdgeId>>,
    pos: Vec<u32>,
    path_vertices: Vec<u32>,
    path_len: u32,
}

impl<'g> Lcrw<'g> {
    pub fn new(graph: &'g DirectedMultigraph) -> Self {
        let n = graph.num_vertices();
        Lcrw {
            graph,
            parent: (0..n as u32).collect(),
            out: graph
                .vertices()
                .map(|v| graph.out_edges(v).to_vec())
                .collect(),
            pos: vec![NONE; n],
            path_vertices: Vec::new(),
            path_len: 0,
        }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        for v in self.graph.vertices() {
            let list = &mut self.out[v.idx()];
            list.clear();
            list.extend_from_slice(self.graph.out_edges(v));
        }
        for v in self.path_vertices.drain(..) {
            self.pos[v as usize] = NONE;
        }
        self.path_len = 0;
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut x = v;
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    /// A uniform live outgoing edge of root `r`, or `None` if there is none.
    fn draw(&mut self, r: u32, rng: &mut Rng) -> Option<EdgeId> {
        loop {
            let len = self.out[r as usize].len();
            if len == 0 {
                return None;
            }
            let i = rng.random_range(0..len);
            let e = self.out[r as usize][i];
            if self.find(self.graph.head(e).0) != r {
                return Some(e);
            }
            self.out[r as usize].swap_remove(i);
        }
    }

    /// Merges the path vertices from position `from` on into one root.
    fn merge_tail(&mut self, from: usize) -> u32 {
        let members: Vec<u32> = self.path_vertices.drain(from..).collect();
        let root = *members
            .iter()
            .max_by_key(|m| self.out[**m as usize].len())
            .expect("nonempty cycle");
        for &m in &members {
            self.pos[m as usize] = NONE;
            if m != root {
                self.parent[m as usize] = root;
                let moved = std::mem::take(&mut self.out[m as usize]);
                self.out[root as usize].extend(moved);
            }
        }
        self.pos[root as usize] = from as u32;
        self.path_vertices.push(root);
        root
    }

    /// Runs one walk from `start`. With `stop_on_return` the walk also stops
    /// when it closes a loop through the start vertex.
    pub fn run(
        &mut self,
        start: VertexId,
        step_cap: u64,
        rng: &mut Rng,
        stop_on_return: bool,
    ) -> LcrwTrace {
        self.reset();
        let mut trace = LcrwTrace {
            start,
            steps: Vec::new(),
            status: WalkStatus::StepCapReached,
            returned: false,
        };
        let mut cur = start.0;
        self.pos[cur as usize] = 0;
        self.path_vertices.push(cur);
        while (trace.steps.len() as u64) < step_cap {
            let Some(e) = self.draw(cur, rng) else {
                trace.status = WalkStatus::Exhausted;
                break;
            };
            let h = self.find(self.graph.head(e).0);
            let p = self.pos[h as usize];
            if p != NONE {
                let cycle_len = self.path_len - p + 1;
                self.path_len = p;
                cur = self.merge_tail(p as usize);
                trace.steps.push(LcrwStep {
                    edge: e,
                    event: LcrwEvent::Contract(cycle_len),
                    path_len: self.path_len,
                });
                if p == 0 && stop_on_return {
                    trace.returned = true;
                    break;
                }
            } else {
                self.path_len += 1;
                trace.steps.push(LcrwStep {
                    edge: e,
                    event: LcrwEvent::Extend,
                    path_len: self.path_len,
                });
                if self.graph.is_boundary(VertexId(h)) {
                    trace.status = WalkStatus::HitBoundary;
                    break;
                }
                self.pos[h as usize] = self.path_len;
                self.path_vertices.push(h);
                cur = h;
            }
        }
        trace
    }
}

/// One LCRW from `start` until the boundary or `step_cap` steps.
pub fn lcrw_run(
    graph: &DirectedMultigraph,
    start: VertexId,
    step_cap: u64,
    s: u64,
) -> Result<LcrwTrace, WalkError> {
    if graph.is_boundary(start) {
        return Err(WalkError::BoundaryStart(start));
    }
    Ok(Lcrw::new(graph).run(start, step_cap, &mut seed::rng(s), false))
}

/// Empirical total-variation distance between two laws on exposed-edge
/// sequences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvReport {
    pub tv: f64,
    pub stderr: f64,
    pub trials: u64,
    pub outcomes: usize,
}

const TV_CHUNK: u64 = 4096;

fn merge_counts(parts: Vec<BTreeMap<Vec<EdgeId>, u64>>) -> BTreeMap<Vec<EdgeId>, u64> {
    let mut total = BTreeMap::new();
    for p in parts {
        for (k, c) in p {
            *total.entry(k).or_insert(0) += c;
        }
    }
    total
}

/// Compares the LCRW with the CLEB walk under i.i.d. Exponential(1)
/// weights by the law of the exposed-edge sequence, `trials` runs each.
pub fn lcrw_equals_cleb_check(
    graph: &DirectedMultigraph,
    start: VertexId,
    trials: u64,
    s: u64,
) -> Result<TvReport, WalkError> {
    if graph.is_boundary(start) {
        return Err(WalkError::BoundaryStart(start));
    }
    let lcrw_seed = seed::derive_named(s, "lcrw");
    let cleb_seed = seed::derive_named(s, "cleb");
    let lcrw = merge_counts(par_chunks(trials, TV_CHUNK, |range| {
        let mut walk = Lcrw::new(graph);
        let mut counts = BTreeMap::new();
        for i in range {
            let t = walk.run(
                start,
                u64::MAX,
                &mut seed::rng(seed::derive(lcrw_seed, i)),
                false,
            );
            *counts.entry(t.exposed()).or_insert(0u64) += 1;
        }
        counts
    }));
    let cleb: Vec<Result<BTreeMap<Vec<EdgeId>, u64>, WalkError>> =
        par_chunks(trials, TV_CHUNK, |range| {
            let mut counts = BTreeMap::new();
            for i in range {
                let mut sub = seed::derive(cleb_seed, i);
                let rec = loop {
                    let w: Vec<f64> = graph
                        .edge_ids()
                        .map(|e| sample_edge(sub, graph.edge_label(e), true))
                        .collect();
                    match cleb_walk(graph, WeightAssignment::new(w), start, u64::MAX) {
                        Err(ClebError::TieDetected(..)) => sub = seed::derive(sub, u64::MAX),
                        other => break other?,
                    }
                };
                *counts.entry(rec.exposed).or_insert(0u64) += 1;
            }
            Ok(counts)
        });
    let cleb = merge_counts(cleb.into_iter().collect::<Result<_, _>>()?);

    let n = trials as f64;
    let mut keys: Vec<&Vec<EdgeId>> = lcrw.keys().chain(cleb.keys()).collect();
    keys.sort();
    keys.dedup();
    let (mut tv, mut se) = (0.0, 0.0);
    for k in &keys {
        let p = *lcrw.get(*k).unwrap_or(&0) as f64 / n;
        let q = *cleb.get(*k).unwrap_or(&0) as f64 / n;
        tv += (p - q).abs();
        se += ((p * (1.0 - p) + q * (1.0 - q)) / n).sqrt();
    }
    Ok(TvReport {
        tv: 0.5 * tv,
        stderr: 0.5 * se,
        trials,
        outcomes: keys.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn single_edge_hits_boundary() {
        let g = build_graph(&[0, 1], &[1], &[(0, 1), (1, 0)]).unwrap();
        let t = lcrw_run(&g, VertexId(0), 10, 3).unwrap();
        assert_eq!(t.status, WalkStatus::HitBoundary);
        assert_eq!(t.steps.len(), 1);
    }

    #[test]
    fn backstep_contracts() {
        // v ⇄ a → ∂: from a the walk either backsteps (contract 2) or exits
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        for s in 0..50 {
            let t = lcrw_run(&g, VertexId(0), 100, s).unwrap();
            assert_eq!(t.status, WalkStatus::HitBoundary);
            for w in t.steps.windows(2) {
                match w[1].event {
                    LcrwEvent::Extend => assert_eq!(w[1].path_len, w[0].path_len + 1),
                    LcrwEvent::Contract(k) => assert_eq!(w[1].path_len + k, w[0].path_len + 1),
                }
            }
        }
    }
}
