//! Local perturbations that move the MSA by one edge.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::arborescence::Arborescence;
use crate::cleb::cleb_walk;
use crate::graph::{DirectedMultigraph, EdgeId, VertexId};
use crate::instances::random_instance;
use crate::seed;
use crate::weights::WeightAssignment;
use crate::TIE_TOLERANCE;

use super::{brute_force_msa, OracleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PerturbMode {
    /// Σ = endpoints of the futures of u and v up to their merge point.
    Futures,
    /// Σ = endpoints of the first-epoch exposed set of the CLEB walk from v,
    /// minus the head of f_1.
    WalkEpoch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbVerdict {
    pub sigma: BTreeSet<VertexId>,
    pub m_sigma: f64,
    pub expected: Vec<EdgeId>,
    pub obtained: Vec<EdgeId>,
}

impl PerturbVerdict {
    pub fn matched(&self) -> bool {
        self.expected == self.obtained
    }
}

fn future_edge_set(t: &Arborescence, graph: &DirectedMultigraph, v: VertexId) -> BTreeSet<EdgeId> {
    t.future_edges(graph, v).into_iter().collect()
}

/// Raises the weights of edges leaving Σ (outside T* ∪ {e2}) and of e1 by
/// 2·M_Σ, then checks that the brute-force MSA becomes T* \ {e1} ∪ {e2}.
pub fn perturb_and_verify(
    graph: &DirectedMultigraph,
    weights: &[f64],
    e1: EdgeId,
    e2: EdgeId,
    mode: PerturbMode,
) -> Result<PerturbVerdict, OracleError> {
    for e in [e1, e2] {
        if e.idx() >= graph.num_edges() {
            return Err(OracleError::UnknownEdge(e));
        }
    }
    let v = graph.tail(e1);
    if graph.tail(e2) != v || e1 == e2 {
        return Err(OracleError::PreconditionViolated(
            "e1 and e2 must be distinct edges out of one vertex".into(),
        ));
    }
    let (t_star, _) = brute_force_msa(graph, weights, TIE_TOLERANCE)?;
    if t_star.get(v) != Some(e1) {
        return Err(OracleError::PreconditionViolated(
            "e1 is not in the MSA".into(),
        ));
    }
    let u = graph.head(e2);
    if t_star.future(graph, u).contains(&v) {
        return Err(OracleError::PreconditionViolated(
            "v lies on the future of the head of e2".into(),
        ));
    }

    let sigma: BTreeSet<VertexId> = match mode {
        PerturbMode::Futures => {
            let fu = future_edge_set(&t_star, graph, u);
            let fv = future_edge_set(&t_star, graph, v);
            let meet = t_star.merge_point(graph, u, v);
            fu.symmetric_difference(&fv)
                .flat_map(|e| [graph.tail(*e), graph.head(*e)])
                .filter(|x| Some(*x) != meet)
                .collect()
        }
        PerturbMode::WalkEpoch => {
            let rec = cleb_walk(graph, WeightAssignment::new(weights.to_vec()), v, u64::MAX)?;
            let f1 = rec
                .epochs()
                .first()
                .map(|ep| ep.seed_edge)
                .ok_or(OracleError::NoArborescence)?;
            let f1_head = graph.head(f1);
            rec.first_epoch_exposed()
                .iter()
                .flat_map(|e| [graph.tail(*e), graph.head(*e)])
                .filter(|x| *x != f1_head)
                .collect()
        }
    };
    let e_sigma: Vec<EdgeId> = sigma
        .iter()
        .flat_map(|x| graph.out_edges(*x).iter().copied())
        .collect();
    let m_sigma = e_sigma
        .iter()
        .map(|e| weights[e.idx()])
        .fold(0.0f64, f64::max);

    let mut perturbed = weights.to_vec();
    for &e in &e_sigma {
        if (!t_star.contains_edge(e) && e != e2) || e == e1 {
            perturbed[e.idx()] = weights[e.idx()] + 2.0 * m_sigma;
        }
    }
    if !e_sigma.contains(&e1) {
        perturbed[e1.idx()] = weights[e1.idx()] + 2.0 * m_sigma;
    }

    let mut expected = t_star.clone();
    expected.insert(v, e2);
    let (obtained, _) = brute_force_msa(graph, &perturbed, TIE_TOLERANCE)?;
    Ok(PerturbVerdict {
        sigma,
        m_sigma,
        expected: expected.edges(),
        obtained: obtained.edges(),
    })
}

/// A perturbation instance: e1 ∈ T*, e2 another edge out of the same tail
/// v, and v not on the future of the head of e2.
#[derive(Clone, Debug)]
pub struct PerturbationCase {
    pub graph: DirectedMultigraph,
    pub weights: Vec<f64>,
    pub e1: EdgeId,
    pub e2: EdgeId,
}

/// Draws a seeded random instance and picks an eligible (e1, e2), if any.
pub fn eligible_perturbation(
    s: u64,
    max_vertices: usize,
    max_edges: usize,
) -> Option<PerturbationCase> {
    let (graph, exact) = random_instance(s, max_vertices, max_edges);
    let weights: Vec<f64> = exact
        .iter()
        .map(|r| *r.numer() as f64 / *r.denom() as f64)
        .collect();
    let (t_star, _) = brute_force_msa(&graph, &weights, TIE_TOLERANCE).ok()?;
    let mut candidates = Vec::new();
    for v in graph.interior() {
        let e1 = t_star.get(v)?;
        for &e2 in graph.out_edges(v) {
            if e2 != e1 && !t_star.future(&graph, graph.head(e2)).contains(&v) {
                candidates.push((e1, e2));
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let pick = seed::derive(s, u64::MAX) as usize % candidates.len();
    let (e1, e2) = candidates[pick];
    Some(PerturbationCase {
        graph,
        weights,
        e1,
        e2,
    })
}
