//! MSA of growing wired balls under one coupled weight sample.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arborescence::{connectivity_profile, Arborescence};
use crate::cleb::{cleb_walk_algorithm, ClebError};
use crate::graph::{DirectedMultigraph, VertexId};
use crate::seed;
use crate::weights::{sample_weights, WeightError, WeightModel};
use crate::Weights;

use super::{FamilyError, GraphFamily};

/// Weights of a realization keyed by (master seed, edge label), so an edge
/// carries the same weight at every radius.
pub fn coupled_weights(
    graph: &DirectedMultigraph,
    model: &WeightModel,
    master_seed: u64,
) -> Result<Weights, WeightError> {
    sample_weights(model, graph, master_seed)
}

fn site(graph: &DirectedMultigraph, label: u64) -> Result<VertexId, FamilyError> {
    graph
        .vertex_by_label(label)
        .filter(|v| !graph.is_boundary(*v))
        .ok_or_else(|| {
            FamilyError::BadParameters(format!("site {label} is outside the smallest radius"))
        })
}

/// MSA of G_r^w, running CLEB walks from `probes` first.
pub fn wired_msa(
    graph: &DirectedMultigraph,
    model: &WeightModel,
    master_seed: u64,
    probes: &[u64],
) -> Result<Arborescence, FamilyError> {
    let weights = coupled_weights(graph, model, master_seed)
        .map_err(|e| FamilyError::BadParameters(e.to_string()))?;
    let mut order = probes
        .iter()
        .map(|p| site(graph, *p))
        .collect::<Result<Vec<_>, _>>()?;
    order.extend(graph.interior());
    let (msa, _) = cleb_walk_algorithm(graph, weights, &order)
        .map_err(|e: ClebError| FamilyError::BadParameters(e.to_string()))?;
    Ok(msa)
}

/// Outgoing MSA edge (by label) of one probe at each tested radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeHistory {
    pub seed: u64,
    pub probe: u64,
    pub edges: Vec<u64>,
}

impl ProbeHistory {
    /// Index of the first radius from which the edge never changes.
    pub fn stabilization_index(&self) -> usize {
        let last = self.edges.last();
        self.edges.len()
            - self
                .edges
                .iter()
                .rev()
                .take_while(|e| Some(*e) == last)
                .count()
    }

    /// The edge changed at the largest tested radius, so no stabilization
    /// was observed.
    pub fn censored(&self) -> bool {
        self.edges.len() < 2 || self.stabilization_index() + 1 == self.edges.len()
    }

    pub fn constant(&self) -> bool {
        self.stabilization_index() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizationReport {
    pub radii: Vec<u64>,
    pub histories: Vec<ProbeHistory>,
}

impl StabilizationReport {
    /// Fraction of histories whose edge is the same at every tested radius.
    pub fn agreement(&self) -> f64 {
        self.histories.iter().filter(|h| h.constant()).count() as f64
            / self.histories.len().max(1) as f64
    }

    /// `seed,probe,<edge at each radius>,stabilization_radius,censored`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,probe");
        for r in &self.radii {
            out.push_str(&format!(",r{r}"));
        }
        out.push_str(",stabilization_radius,censored\n");
        for h in &self.histories {
            out.push_str(&format!("{},{}", h.seed, h.probe));
            for e in &h.edges {
                out.push_str(&format!(",{e}"));
            }
            out.push_str(&format!(
                ",{},{}\n",
                self.radii[h.stabilization_index()],
                h.censored()
            ));
        }
        out
    }
}

/// For each replica seed, the probes' outgoing MSA edges across `radii`.
/// Replica `i` uses weight seed `derive(master_seed, i)`.
pub fn wired_msa_sequence(
    family: &GraphFamily,
    model: &WeightModel,
    radii: &[u64],
    probes: &[u64],
    master_seed: u64,
    replicas: u64,
) -> Result<StabilizationReport, FamilyError> {
    use rayon::prelude::*;
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FamilyError::BadParameters("radii must increase".into()));
    }
    let graphs = radii
        .iter()
        .map(|r| family.realize(*r))
        .collect::<Result<Vec<_>, _>>()?;
    let per_seed: Vec<Result<Vec<ProbeHistory>, FamilyError>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let s = seed::derive(master_seed, i);
            let mut hist: Vec<ProbeHistory> = probes
                .iter()
                .map(|p| ProbeHistory {
                    seed: s,
                    probe: *p,
                    edges: Vec::new(),
                })
                .collect();
            for g in &graphs {
                let msa = wired_msa(g, model, s, probes)?;
                for h in &mut hist {
                    let e = msa.get(site(g, h.probe)?).expect("spanning");
                    h.edges.push(g.edge_label(e));
                }
            }
            Ok(hist)
        })
        .collect();
    let mut histories = Vec::new();
    for h in per_seed {
        histories.extend(h?);
    }
    Ok(StabilizationReport {
        radii: radii.to_vec(),
        histories,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityViolation {
    pub seed: u64,
    pub pair: (u64, u64),
    pub from_radius: u64,
    pub to_radius: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityVerdict {
    pub comparisons: u64,
    pub connected: u64,
    pub violations: Vec<MonotonicityViolation>,
}

impl MonotonicityVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that "the futures of u and v meet before ∂" never switches from
/// true to false as the radius grows.
pub fn connectivity_monotonicity_check(
    family: &GraphFamily,
    model: &WeightModel,
    radii: &[u64],
    pairs: &[(u64, u64)],
    master_seed: u64,
    replicas: u64,
) -> Result<MonotonicityVerdict, FamilyError> {
    use rayon::prelude::*;
    let graphs = radii
        .iter()
        .map(|r| family.realize(*r))
        .collect::<Result<Vec<_>, _>>()?;
    let probes: Vec<u64> = pairs.iter().flat_map(|(u, v)| [*u, *v]).collect();
    // per replica: its seed and one bit vector per radius
    type Row = (u64, Vec<Vec<bool>>);
    let rows: Vec<Result<Row, FamilyError>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let s = seed::derive(master_seed, i);
            let mut bits = Vec::new();
            for g in &graphs {
                let msa = wired_msa(g, model, s, &probes)?;
                let vp = pairs
                    .iter()
                    .map(|(u, v)| Ok((site(g, *u)?, site(g, *v)?)))
                    .collect::<Result<Vec<_>, FamilyError>>()?;
                bits.push(connectivity_profile(g, &msa, &vp));
            }
            Ok((s, bits))
        })
        .collect();
    let mut verdict = MonotonicityVerdict {
        comparisons: 0,
        connected: 0,
        violations: Vec::new(),
    };
    for row in rows {
        let (s, bits) = row?;
        for k in 0..pairs.len() {
            verdict.connected += bits.iter().filter(|b| b[k]).count() as u64;
            for r in 1..radii.len() {
                verdict.comparisons += 1;
                if bits[r - 1][k] && !bits[r][k] {
                    verdict.violations.push(MonotonicityViolation {
                        seed: s,
                        pair: pairs[k],
                        from_radius: radii[r - 1],
                        to_radius: radii[r],
                    });
                }
            }
        }
    }
    Ok(verdict)
}

/// One component of the MSA with ∂ removed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentStats {
    /// The vertex of the component whose MSA edge enters the boundary.
    pub root: VertexId,
    pub size: usize,
    /// Vertices of the component with a graph edge into the boundary.
    pub boundary_touching: usize,
}

/// Splits a spanning arborescence into the trees hanging off the boundary.
pub fn component_end_stats(graph: &DirectedMultigraph, msa: &Arborescence) -> Vec<ComponentStats> {
    let mut root_of: Vec<Option<VertexId>> = vec![None; graph.num_vertices()];
    let mut by_root: BTreeMap<VertexId, ComponentStats> = BTreeMap::new();
    for v in graph.interior() {
        let mut trail = Vec::new();
        let mut x = v;
        let root = loop {
            if let Some(r) = root_of[x.idx()] {
                break r;
            }
            trail.push(x);
            let e = msa.get(x).expect("spanning arborescence");
            let h = graph.head(e);
            if graph.is_boundary(h) {
                break x;
            }
            x = h;
        };
        for t in trail {
            root_of[t.idx()] = Some(root);
        }
        let touching = graph
            .out_edges(v)
            .iter()
            .any(|e| graph.is_boundary(graph.head(*e)));
        let c = by_root.entry(root).or_insert(ComponentStats {
            root,
            size: 0,
            boundary_touching: 0,
        });
        c.size += 1;
        c.boundary_touching += touching as usize;
    }
    by_root.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, EdgeId};
    use crate::Rational;

    #[test]
    fn forced_tree_stabilizes_immediately() {
        // edges toward the leaves are cheap and distinct among siblings, so
        // every vertex points down and the MSA does not depend on the radius
        let fam = GraphFamily::RegularTree { arity: 2 };
        let g = fam.realize(4).unwrap();
        let w: BTreeMap<u64, Rational> = g
            .edge_ids()
            .map(|e| {
                let l = g.edge_label(e);
                let c = (l >> 1) as i64;
                (
                    l,
                    if l & 1 == 1 {
                        Rational::new(c % 97 + 1, 1000)
                    } else {
                        Rational::from_integer(2)
                    },
                )
            })
            .collect();
        let report =
            wired_msa_sequence(&fam, &WeightModel::Fixed(w), &[2, 3, 4], &[0], 1, 1).unwrap();
        let h = &report.histories[0];
        assert_eq!(h.stabilization_index(), 0);
        // child 1 of the root is the cheaper one
        assert_eq!(h.edges[0], 3);
    }

    #[test]
    fn components_of_a_wired_path() {
        // ∂ - a - b - ∂ with a and b both exiting directly
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (0, 2), (1, 2)]).unwrap();
        let msa = Arborescence::from_edges(&g, [EdgeId(2), EdgeId(3)]);
        let c = component_end_stats(&g, &msa);
        assert_eq!(c.len(), 2);
        let star = Arborescence::from_edges(&g, [EdgeId(0), EdgeId(3)]);
        assert_eq!(component_end_stats(&g, &star).len(), 1);
    }

    #[test]
    fn history_bookkeeping() {
        let h = ProbeHistory {
            seed: 0,
            probe: 0,
            edges: vec![3, 5, 5, 5],
        };
        assert_eq!(h.stabilization_index(), 1);
        assert!(!h.censored() && !h.constant());
        let h = ProbeHistory {
            seed: 0,
            probe: 0,
            edges: vec![5, 5, 3],
        };
        assert!(h.censored());
    }
}
