//! CLEB walks, their epoch structure, branch recovery and the CLEB walk
//! algorithm.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::arborescence::Arborescence;
use crate::graph::{contraction, ContractionRecord, DirectedMultigraph, EdgeId, VertexId};
use crate::scalar::Scalar;
use crate::weights::WeightAssignment;

use super::{ClebError, Engine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WalkStatus {
    HitBoundary,
    StepCapReached,
    /// The current supervertex has no outgoing edge left (only possible
    /// when the boundary is empty or unreachable).
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkContraction {
    /// Walk step (1-based) at which the loop was closed.
    pub step: usize,
    pub record: ContractionRecord,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkRecord {
    pub start: VertexId,
    /// S: one exposed edge per step, in order.
    pub exposed: Vec<EdgeId>,
    pub colors: Vec<u32>,
    pub pis: Vec<f64>,
    /// |P_t| after step t; `path_len[0]` is step 1.
    pub path_len: Vec<u32>,
    pub contractions: Vec<WalkContraction>,
    /// Final live path P.
    pub path: Vec<EdgeId>,
    pub status: WalkStatus,
}

/// One epoch j: the seed edge f_j, the last time τ_{N_j} at which the live
/// path had length j-1, and the loops 𝓛_j closed in that epoch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Epoch {
    pub seed_edge: EdgeId,
    pub tau: usize,
    pub loops: std::ops::Range<usize>,
}

impl WalkRecord {
    pub fn steps(&self) -> usize {
        self.exposed.len()
    }

    /// Whether the epoch structure is only provisional (walk was cut short).
    pub fn censored(&self) -> bool {
        self.status != WalkStatus::HitBoundary
    }

    /// Number of steps after which the live path was empty.
    pub fn returns_to_empty(&self) -> usize {
        self.path_len.iter().filter(|l| **l == 0).count()
    }

    /// Epochs of the final path. For a censored walk these describe the
    /// path at the moment the walk stopped.
    pub fn epochs(&self) -> Vec<Epoch> {
        let p = self.path.len();
        // last[k] = last time t ≥ 0 with |P_t| = k (time 0 has length 0)
        let mut last = vec![0usize; p + 1];
        for (i, &l) in self.path_len.iter().enumerate() {
            if (l as usize) <= p {
                last[l as usize] = i + 1;
            }
        }
        let mut epochs = Vec::with_capacity(p);
        let mut lo = 0usize;
        let mut cursor = 0usize;
        for j in 1..=p {
            let tau = last[j - 1];
            let begin = cursor;
            while cursor < self.contractions.len() && self.contractions[cursor].step <= tau {
                debug_assert!(self.contractions[cursor].step > lo);
                cursor += 1;
            }
            epochs.push(Epoch {
                seed_edge: self.path[j - 1],
                tau,
                loops: begin..cursor,
            });
            lo = tau + 1;
        }
        epochs
    }

    /// S_{τ_{N_1}+1}: edges exposed up to and including f_1.
    pub fn first_epoch_exposed(&self) -> &[EdgeId] {
        match self.epochs().first() {
            Some(ep) => &self.exposed[..ep.tau + 1],
            None => &[],
        }
    }

    /// Edges of the cycles contracted in the first epoch (E_CLEB).
    pub fn first_epoch_cycle_edges(&self) -> BTreeSet<EdgeId> {
        self.first_epoch_contractions()
            .flat_map(|c| c.record.cycle.iter().copied())
            .collect()
    }

    /// Edges removed by the first-epoch contractions (Ē_CLEB).
    pub fn first_epoch_removed_edges(&self) -> BTreeSet<EdgeId> {
        self.first_epoch_contractions()
            .flat_map(|c| c.record.removed.iter().copied())
            .collect()
    }

    fn first_epoch_contractions(&self) -> impl Iterator<Item = &WalkContraction> {
        let range = self
            .epochs()
            .first()
            .map(|e| e.loops.clone())
            .unwrap_or(0..0);
        self.contractions[range].iter()
    }

    /// Base vertices merged with the start by the end of the first epoch.
    pub fn first_epoch_cluster(&self, graph: &DirectedMultigraph) -> BTreeSet<VertexId> {
        let mut cluster: BTreeSet<VertexId> = [self.start].into();
        for c in self.first_epoch_contractions() {
            for e in &c.record.cycle {
                cluster.insert(graph.tail(*e));
                cluster.insert(graph.head(*e));
            }
        }
        cluster
    }

    /// JSON lines log of the walk, edges written by label.
    pub fn to_json_lines(&self, graph: &DirectedMultigraph) -> String {
        let mut out = String::new();
        let mut c = 0;
        for (i, e) in self.exposed.iter().enumerate() {
            let step = i + 1;
            let line = serde_json::json!({
                "step": step, "event": "expose", "edge": graph.edge_label(*e),
                "color": self.colors[i], "pi": self.pis[i], "path_len": self.path_len[i],
            });
            out.push_str(&line.to_string());
            out.push('\n');
            while c < self.contractions.len() && self.contractions[c].step == step {
                let rec = &self.contractions[c].record;
                let line = serde_json::json!({
                    "step": step, "event": "contract",
                    "cycle": rec.cycle.iter().map(|e| graph.edge_label(*e)).collect::<Vec<_>>(),
                });
                out.push_str(&line.to_string());
                out.push('\n');
                c += 1;
            }
        }
        out
    }
}

/// Runs one CLEB walk on `eng` from the live supervertex `start`. The walk
/// stops when the head of the newly exposed edge is a boundary vertex or a
/// supervertex settled by an earlier walk.
pub(crate) fn run_walk<S: Scalar>(
    eng: &mut Engine<'_, S>,
    start: VertexId,
    step_cap: u64,
) -> Result<WalkRecord, ClebError> {
    if eng.stack.is_boundary(start) {
        return Err(ClebError::BoundaryStart(start));
    }
    let mut rec = WalkRecord {
        start,
        exposed: Vec::new(),
        colors: Vec::new(),
        pis: Vec::new(),
        path_len: Vec::new(),
        contractions: Vec::new(),
        path: Vec::new(),
        status: WalkStatus::StepCapReached,
    };
    // position of each supervertex on the live path
    let mut on_path: HashMap<VertexId, usize> = HashMap::new();
    let mut path_vertices = vec![start];
    on_path.insert(start, 0);
    let mut cur = start;
    loop {
        if rec.exposed.len() as u64 >= step_cap {
            break;
        }
        if eng.stack.out_edges(cur).is_empty() {
            rec.status = WalkStatus::Exhausted;
            break;
        }
        eng.step += 1;
        let (e, pi) = eng.expose(cur)?;
        rec.exposed.push(e);
        rec.colors.push(eng.edge_color(e));
        rec.pis.push(pi.as_f64());
        let h = eng.stack.head(e);
        if let Some(&pos) = on_path.get(&h) {
            let mut cycle = rec.path[pos..].to_vec();
            cycle.push(e);
            let r = eng.contract(&cycle)?;
            for v in path_vertices.drain(pos..) {
                on_path.remove(&v);
            }
            rec.path.truncate(pos);
            let s = eng.stack.record(r).supervertex;
            path_vertices.push(s);
            on_path.insert(s, pos);
            rec.contractions.push(WalkContraction {
                step: rec.exposed.len(),
                record: eng.stack.record(r).clone(),
            });
            cur = s;
        } else if eng.stack.is_boundary(h) || eng.exposed(h).is_some() {
            rec.path.push(e);
            rec.path_len.push(rec.path.len() as u32);
            rec.status = WalkStatus::HitBoundary;
            break;
        } else {
            rec.path.push(e);
            path_vertices.push(h);
            on_path.insert(h, rec.path.len());
            cur = h;
        }
        rec.path_len.push(rec.path.len() as u32);
    }
    Ok(rec)
}

/// CLEB walk from `start` on a fresh copy of the instance.
pub fn cleb_walk<S: Scalar>(
    graph: &DirectedMultigraph,
    weights: WeightAssignment<S>,
    start: VertexId,
    step_cap: u64,
) -> Result<WalkRecord, ClebError> {
    let mut eng = Engine::new(graph, weights);
    run_walk(&mut eng, start, step_cap)
}

/// Γ_v and B_v = V(Γ_v).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub gamma: Arborescence,
    pub vertices: BTreeSet<VertexId>,
}

/// Rebuilds Γ_v by uncontracting, epoch by epoch, the loops 𝓛_j in reverse
/// order starting from the single edge f_j.
pub fn recover_branch(
    graph: &DirectedMultigraph,
    record: &WalkRecord,
) -> Result<Branch, ClebError> {
    if record.status != WalkStatus::HitBoundary {
        return Err(ClebError::IncompleteWalk);
    }
    let mut parent: HashMap<VertexId, VertexId> = HashMap::new();
    for c in &record.contractions {
        for m in &c.record.absorbed {
            parent.insert(*m, c.record.supervertex);
        }
    }
    let top = |v: VertexId| {
        let mut x = v;
        while let Some(p) = parent.get(&x) {
            x = *p;
        }
        x
    };
    let mut gamma = Arborescence::new();
    for ep in record.epochs() {
        let mut part = Arborescence::new();
        part.insert(top(graph.tail(ep.seed_edge)), ep.seed_edge);
        for c in record.contractions[ep.loops.clone()].iter().rev() {
            let s = c.record.supervertex;
            contraction::expand(graph, &c.record, &mut part, |v| {
                let mut x = v;
                while parent.get(&x) != Some(&s) {
                    x = *parent.get(&x).expect("vertex lies inside the supervertex");
                }
                x
            })?;
        }
        for (v, e) in part.iter() {
            gamma.insert(v, e);
        }
    }
    let mut vertices = BTreeSet::new();
    for (_, e) in gamma.iter() {
        vertices.insert(graph.tail(e));
        vertices.insert(graph.head(e));
    }
    Ok(Branch { gamma, vertices })
}

/// Successive CLEB walks from the first vertex (in `order`) not yet
/// covered, each stopping on the union of the previous branches; then one
/// full reverse uncontraction. Vertices missing from `order` are visited
/// afterwards in id order.
pub fn cleb_walk_algorithm<S: Scalar>(
    graph: &DirectedMultigraph,
    weights: WeightAssignment<S>,
    order: &[VertexId],
) -> Result<(Arborescence, Vec<WalkRecord>), ClebError> {
    let mut eng = Engine::new(graph, weights);
    let mut records = Vec::new();
    for x in order.iter().copied().chain(graph.vertices()) {
        if graph.is_boundary(x) {
            continue;
        }
        let s = eng.stack.find(x);
        if eng.exposed(s).is_some() {
            continue;
        }
        let rec = run_walk(&mut eng, s, u64::MAX)?;
        if rec.status != WalkStatus::HitBoundary {
            return Err(ClebError::Disconnected(x));
        }
        records.push(rec);
    }
    let msa = eng.finish()?;
    Ok((msa, records))
}

/// Whether u and v are connected in the MSA below the boundary, decided
/// from a CLEB walk from u followed by one from v that stops on B_u.
pub fn walk_connectivity<S: Scalar>(
    graph: &DirectedMultigraph,
    weights: WeightAssignment<S>,
    u: VertexId,
    v: VertexId,
) -> Result<bool, ClebError> {
    let mut eng = Engine::new(graph, weights);
    let first = run_walk(&mut eng, u, u64::MAX)?;
    if first.status != WalkStatus::HitBoundary {
        return Err(ClebError::Disconnected(u));
    }
    if graph.is_boundary(v) {
        return Ok(false);
    }
    let s = eng.stack.find(v);
    if eng.exposed(s).is_some() {
        // v already lies in B_u
        return Ok(true);
    }
    let second = run_walk(&mut eng, s, u64::MAX)?;
    if second.status != WalkStatus::HitBoundary {
        return Err(ClebError::Disconnected(v));
    }
    let last = *second.path.last().expect("walk took a step");
    Ok(!graph.is_boundary(graph.head(last)))
}
