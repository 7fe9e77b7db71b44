//! Monte Carlo estimates of MSA-event probabilities.

use rayon::prelude::*;

use crate::arborescence::Arborescence;
use crate::graph::{DirectedMultigraph, EdgeId};
use crate::seed;
use crate::weights::WeightModel;
use crate::TIE_TOLERANCE;

use super::{enumerate_edge_sets, minimum_index, OracleError, DEFAULT_ENUMERATION_CAP};

const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn from_count(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Estimate {
            mean: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }
}

/// Index of the MSA among `sets` for sample `i`, resampling on a tie.
fn sample_winner(
    graph: &DirectedMultigraph,
    sets: &[Vec<EdgeId>],
    model: &WeightModel,
    seed: u64,
    i: u64,
    weights: &mut Vec<f64>,
) -> Result<usize, OracleError> {
    let mut sub = seed::derive(seed, i);
    for _ in 0..64 {
        weights.clear();
        for e in graph.edge_ids() {
            weights.push(
                model
                    .edge_weight(sub, graph.edge_label(e))
                    .map_err(|e| OracleError::Weights(e.to_string()))?,
            );
        }
        match minimum_index(sets, weights, TIE_TOLERANCE) {
            Err(OracleError::TieDetected(..)) if model.is_random() => {
                sub = seed::derive(sub, u64::MAX)
            }
            other => return other,
        }
    }
    unreachable!("64 consecutive ties under a continuous model")
}

/// Per-arborescence win counts over `samples` weight draws.
fn winner_counts(
    graph: &DirectedMultigraph,
    sets: &[Vec<EdgeId>],
    model: &WeightModel,
    samples: u64,
    seed: u64,
) -> Result<Vec<u64>, OracleError> {
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Result<Vec<u64>, OracleError>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; sets.len()];
            let mut weights = Vec::with_capacity(graph.num_edges());
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                counts[sample_winner(graph, sets, model, seed, i, &mut weights)?] += 1;
            }
            Ok(counts)
        })
        .collect();
    let mut total = vec![0u64; sets.len()];
    for p in partial {
        for (t, c) in total.iter_mut().zip(p?) {
            *t += c;
        }
    }
    Ok(total)
}

/// Fraction of i.i.d. weight draws whose MSA equals `target`.
pub fn msa_event_probability(
    graph: &DirectedMultigraph,
    target: &Arborescence,
    model: &WeightModel,
    samples: u64,
    seed: u64,
) -> Result<Estimate, OracleError> {
    let sets = enumerate_edge_sets(graph, DEFAULT_ENUMERATION_CAP)?;
    let want = target.edges();
    let index = sets
        .iter()
        .position(|s| {
            let mut s = s.clone();
            s.sort();
            s == want
        })
        .ok_or(OracleError::BadTarget)?;
    let counts = winner_counts(graph, &sets, model, samples, seed)?;
    Ok(Estimate::from_count(counts[index], samples))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionRow {
    /// Sorted edge labels of the arborescence.
    pub signature: Vec<u64>,
    pub count: u64,
    pub freq: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceDistributionReport {
    pub samples: u64,
    pub rows: Vec<DistributionRow>,
}

impl InstanceDistributionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("arborescence,count,freq,stderr\n");
        for r in &self.rows {
            let sig: Vec<String> = r.signature.iter().map(|l| l.to_string()).collect();
            out.push_str(&format!(
                "{},{},{:.6},{:.6}\n",
                sig.join(" "),
                r.count,
                r.freq,
                r.stderr
            ));
        }
        out
    }
}

/// Empirical law of the MSA over all spanning arborescences of `graph`.
pub fn distribution_report(
    graph: &DirectedMultigraph,
    model: &WeightModel,
    samples: u64,
    seed: u64,
) -> Result<InstanceDistributionReport, OracleError> {
    let sets = enumerate_edge_sets(graph, DEFAULT_ENUMERATION_CAP)?;
    let counts = winner_counts(graph, &sets, model, samples, seed)?;
    let rows = sets
        .iter()
        .zip(counts)
        .map(|(set, count)| {
            let est = Estimate::from_count(count, samples);
            let mut signature: Vec<u64> = set.iter().map(|e| graph.edge_label(*e)).collect();
            signature.sort();
            DistributionRow {
                signature,
                count,
                freq: est.mean,
                stderr: est.stderr,
            }
        })
        .collect();
    Ok(InstanceDistributionReport { samples, rows })
}

/// Minimum spanning tree of an undirected graph on `n` vertices; returns the
/// chosen edge indices in the order Kruskal adds them.
pub fn kruskal(n: usize, edges: &[(u64, u64)], weights: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|a, b| weights[*a].total_cmp(&weights[*b]));
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut tree = Vec::new();
    for i in order {
        let (a, b) = edges[i];
        let (ra, rb) = (root(&mut parent, a as usize), root(&mut parent, b as usize));
        if ra != rb {
            parent[ra] = rb;
            tree.push(i);
        }
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn single_arborescence_has_probability_one() {
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 2)]).unwrap();
        let t = Arborescence::from_edges(&g, [EdgeId(0), EdgeId(1)]);
        let est = msa_event_probability(&g, &t, &WeightModel::Exponential, 1000, 3).unwrap();
        assert_eq!(est.mean, 1.0);
    }

    #[test]
    fn report_is_normalised() {
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (0, 2), (1, 2)]).unwrap();
        let r = distribution_report(&g, &WeightModel::Uniform, 20_000, 1).unwrap();
        let total: f64 = r.rows.iter().map(|r| r.freq).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(r.to_csv().starts_with("arborescence,count,freq,stderr\n"));
    }

    #[test]
    fn kruskal_on_a_square() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let tree = kruskal(4, &edges, &[0.4, 0.1, 0.9, 0.3]);
        assert_eq!(tree, vec![1, 3, 0]);
    }
}
