//! Weighted loop-erased random walk and its comparison with the CLEB walk
//! at large β.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng as _;
use serde::Serialize;

use crate::cleb::{cleb_walk, WalkStatus};
use crate::graph::{DirectedMultigraph, EdgeId, VertexId};
use crate::oracle::Estimate;
use crate::seed::{self, Rng};
use crate::weights::WeightAssignment;

use super::{par_chunks, WalkError};

pub const DEFAULT_LERW_STEP_CAP: u64 = 100_000;

/// Conductances c(e) = exp(-β w(e)).
#[derive(Clone, Debug, PartialEq)]
pub struct BoltzmannConductance {
    pub weights: Vec<f64>,
    pub beta: f64,
}

impl BoltzmannConductance {
    pub fn new(weights: Vec<f64>, beta: f64) -> Self {
        BoltzmannConductance { weights, beta }
    }

    /// q(e) = c(e) / Σ c over the out-edges of the tail, aligned with
    /// `graph.out_edges(v)`. Computed relative to the smallest weight so
    /// large β does not underflow.
    pub fn transition_probabilities(
        &self,
        graph: &DirectedMultigraph,
    ) -> Result<Vec<Vec<f64>>, WalkError> {
        if !self.beta.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(WalkError::BadConductance);
        }
        Ok(graph
            .vertices()
            .map(|v| {
                let out = graph.out_edges(v);
                let wmin = out
                    .iter()
                    .map(|e| self.weights[e.idx()])
                    .fold(f64::INFINITY, f64::min);
                let c: Vec<f64> = out
                    .iter()
                    .map(|e| (-self.beta * (self.weights[e.idx()] - wmin)).exp())
                    .collect();
                let z: f64 = c.iter().sum();
                c.into_iter().map(|x| x / z).collect()
            })
            .collect())
    }
}

/// One weighted random walk to the boundary with its loop erasure.
#[derive(Clone, Debug, PartialEq)]
pub struct LerwRun {
    pub steps: Vec<EdgeId>,
    pub branch: Vec<EdgeId>,
    pub erased: BTreeSet<EdgeId>,
}

/// Chronological loop erasure of the walk `steps` from `start`: the
/// surviving branch and the set of erased edges.
pub fn loop_erase(
    graph: &DirectedMultigraph,
    start: VertexId,
    steps: &[EdgeId],
) -> (Vec<EdgeId>, BTreeSet<EdgeId>) {
    let mut pos: HashMap<VertexId, usize> = HashMap::from([(start, 0)]);
    let mut vertices = vec![start];
    let mut branch: Vec<EdgeId> = Vec::new();
    let mut erased = BTreeSet::new();
    for &e in steps {
        let h = graph.head(e);
        if let Some(&j) = pos.get(&h) {
            erased.extend(branch.drain(j..));
            erased.insert(e);
            for v in vertices.drain(j + 1..) {
                pos.remove(&v);
            }
        } else {
            branch.push(e);
            pos.insert(h, vertices.len());
            vertices.push(h);
        }
    }
    (branch, erased)
}

fn walk_to_boundary(
    graph: &DirectedMultigraph,
    table: &[Vec<f64>],
    start: VertexId,
    step_cap: u64,
    rng: &mut Rng,
) -> Result<Vec<EdgeId>, WalkError> {
    let mut steps = Vec::new();
    let mut cur = start;
    while !graph.is_boundary(cur) {
        if steps.len() as u64 >= step_cap {
            return Err(WalkError::StepCapReached);
        }
        let out = graph.out_edges(cur);
        let probs = &table[cur.idx()];
        let mut u: f64 = rng.random();
        let mut pick = out.len() - 1;
        for (i, p) in probs.iter().enumerate() {
            if u < *p {
                pick = i;
                break;
            }
            u -= p;
        }
        let e = out[pick];
        steps.push(e);
        cur = graph.head(e);
    }
    Ok(steps)
}

/// LERW from `start` to the boundary with transition law q(e) ∝ c(e).
pub fn wilson_lerw(
    graph: &DirectedMultigraph,
    conductances: &BoltzmannConductance,
    start: VertexId,
    step_cap: u64,
    s: u64,
) -> Result<LerwRun, WalkError> {
    if graph.is_boundary(start) {
        return Err(WalkError::BoundaryStart(start));
    }
    let table = conductances.transition_probabilities(graph)?;
    if graph.interior().any(|v| graph.out_edges(v).is_empty()) {
        return Err(WalkError::StepCapReached);
    }
    let steps = walk_to_boundary(graph, &table, start, step_cap, &mut seed::rng(s))?;
    let (branch, erased) = loop_erase(graph, start, &steps);
    Ok(LerwRun {
        steps,
        branch,
        erased,
    })
}

/// The erased set of one run next to the CLEB walk's first-epoch sets.
#[derive(Clone, Debug, PartialEq)]
pub struct ErasedEdgeReport {
    pub erased: BTreeSet<EdgeId>,
    pub e_cleb: BTreeSet<EdgeId>,
    pub e_bar: BTreeSet<EdgeId>,
}

impl ErasedEdgeReport {
    /// E_CLEB ⊆ erased ⊆ Ē_CLEB.
    pub fn sandwich(&self) -> bool {
        self.e_cleb.is_subset(&self.erased) && self.erased.is_subset(&self.e_bar)
    }
}

/// Edges erased by the walk up to and including its last step out of
/// `cluster`.
fn erased_until_exit(
    graph: &DirectedMultigraph,
    start: VertexId,
    steps: &[EdgeId],
    cluster: &BTreeSet<VertexId>,
) -> BTreeSet<EdgeId> {
    let cut = steps
        .iter()
        .rposition(|e| cluster.contains(&graph.tail(*e)))
        .map_or(0, |i| i + 1);
    loop_erase(graph, start, &steps[..cut]).1
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichRow {
    pub beta: f64,
    pub frequency: f64,
    pub stderr: f64,
    pub trials: u64,
    pub capped: u64,
    /// How many runs erased each edge (by edge label).
    pub erased_counts: BTreeMap<u64, u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichReport {
    pub e_cleb: BTreeSet<EdgeId>,
    pub e_bar: BTreeSet<EdgeId>,
    pub cluster: BTreeSet<VertexId>,
    pub rows: Vec<SandwichRow>,
}

const SANDWICH_CHUNK: u64 = 64;

/// For each β, the fraction of LERW runs whose erased set (until the walk
/// leaves the CLEB walk's first-epoch cluster for good) is sandwiched
/// between E_CLEB and Ē_CLEB. Capped runs count as failures.
pub fn wilson_sandwich_trial(
    graph: &DirectedMultigraph,
    weights: &[f64],
    start: VertexId,
    betas: &[f64],
    trials: u64,
    s: u64,
    step_cap: u64,
) -> Result<SandwichReport, WalkError> {
    let rec = cleb_walk(
        graph,
        WeightAssignment::new(weights.to_vec()),
        start,
        u64::MAX,
    )?;
    if rec.status != WalkStatus::HitBoundary {
        return Err(WalkError::StepCapReached);
    }
    let e_cleb = rec.first_epoch_cycle_edges();
    let e_bar = rec.first_epoch_removed_edges();
    let cluster = rec.first_epoch_cluster(graph);
    let mut rows = Vec::with_capacity(betas.len());
    for (bi, &beta) in betas.iter().enumerate() {
        let table =
            BoltzmannConductance::new(weights.to_vec(), beta).transition_probabilities(graph)?;
        let stream = seed::derive(s, bi as u64);
        let parts = par_chunks(trials, SANDWICH_CHUNK, |range| {
            let (mut hits, mut capped) = (0u64, 0u64);
            let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
            for i in range {
                let mut rng = seed::rng(seed::derive(stream, i));
                match walk_to_boundary(graph, &table, start, step_cap, &mut rng) {
                    Ok(steps) => {
                        let erased = erased_until_exit(graph, start, &steps, &cluster);
                        for e in &erased {
                            *counts.entry(graph.edge_label(*e)).or_insert(0) += 1;
                        }
                        let report = ErasedEdgeReport {
                            erased,
                            e_cleb: e_cleb.clone(),
                            e_bar: e_bar.clone(),
                        };
                        hits += report.sandwich() as u64;
                    }
                    Err(_) => capped += 1,
                }
            }
            (hits, capped, counts)
        });
        let (mut hits, mut capped) = (0, 0);
        let mut erased_counts = BTreeMap::new();
        for (h, c, counts) in parts {
            hits += h;
            capped += c;
            for (k, v) in counts {
                *erased_counts.entry(k).or_insert(0) += v;
            }
        }
        let est = Estimate::from_count(hits, trials);
        rows.push(SandwichRow {
            beta,
            frequency: est.mean,
            stderr: est.stderr,
            trials,
            capped,
            erased_counts,
        });
    }
    Ok(SandwichReport {
        e_cleb,
        e_bar,
        cluster,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn loop_erasure_of_a_detour() {
        // 0→1→0→2(∂): the loop 0→1→0 is erased
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (0, 2)]).unwrap();
        let (branch, erased) = loop_erase(&g, VertexId(0), &[EdgeId(0), EdgeId(1), EdgeId(2)]);
        assert_eq!(branch, vec![EdgeId(2)]);
        assert_eq!(erased, [EdgeId(0), EdgeId(1)].into());
    }

    #[test]
    fn transition_rows_sum_to_one() {
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (0, 2), (1, 2), (0, 2)]).unwrap();
        for beta in [0.0, 1.0, 20.0, 500.0] {
            let t = BoltzmannConductance::new(vec![0.3, 0.1, 0.9, 0.5, 0.45], beta)
                .transition_probabilities(&g)
                .unwrap();
            for row in t.iter().filter(|r| !r.is_empty()) {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tree_erases_nothing() {
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 2)]).unwrap();
        let run = wilson_lerw(
            &g,
            &BoltzmannConductance::new(vec![1.0, 1.0], 1.0),
            VertexId(0),
            100,
            4,
        )
        .unwrap();
        assert!(run.erased.is_empty());
        assert_eq!(run.branch, vec![EdgeId(0), EdgeId(1)]);
    }
}
