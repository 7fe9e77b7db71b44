//! Escape probabilities: exact for the simple random walk, Monte Carlo for
//! the LCRW.

use nalgebra::{DMatrix, DVector};

use crate::cleb::WalkStatus;
use crate::graph::{DirectedMultigraph, VertexId};
use crate::oracle::Estimate;
use crate::seed;

use super::{par_chunks, Lcrw, WalkError};

/// P(simple random walk from `v` hits the boundary before returning to `v`).
/// Each outgoing edge is one unit-conductance step, so on a bidirected
/// graph this is the walk on the underlying undirected multigraph.
pub fn srw_escape_exact(graph: &DirectedMultigraph, v: VertexId) -> Result<f64, WalkError> {
    if graph.is_boundary(v) {
        return Err(WalkError::BoundaryStart(v));
    }
    // h(x) = P_x(hit ∂ before v) on the interior vertices other than v
    let unknowns: Vec<VertexId> = graph.interior().filter(|x| *x != v).collect();
    let mut index = vec![usize::MAX; graph.num_vertices()];
    for (i, x) in unknowns.iter().enumerate() {
        index[x.idx()] = i;
    }
    let n = unknowns.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for (i, &x) in unknowns.iter().enumerate() {
        let out = graph.out_edges(x);
        if out.is_empty() {
            return Err(WalkError::SingularSystem);
        }
        let p = 1.0 / out.len() as f64;
        a[(i, i)] += 1.0;
        for &e in out {
            let y = graph.head(e);
            if graph.is_boundary(y) {
                b[i] += p;
            } else if y != v {
                a[(i, index[y.idx()])] -= p;
            }
        }
    }
    let h = if n == 0 {
        DVector::zeros(0)
    } else {
        a.lu().solve(&b).ok_or(WalkError::SingularSystem)?
    };
    let out = graph.out_edges(v);
    if out.is_empty() {
        return Err(WalkError::SingularSystem);
    }
    let total: f64 = out
        .iter()
        .map(|&e| {
            let y = graph.head(e);
            if graph.is_boundary(y) {
                1.0
            } else {
                h[index[y.idx()]]
            }
        })
        .sum();
    Ok(total / out.len() as f64)
}

const ESCAPE_CHUNK: u64 = 4096;

/// Monte Carlo estimate of P(LCRW from `v` hits the boundary before it
/// closes a loop through `v`).
pub fn lcrw_escape_mc(
    graph: &DirectedMultigraph,
    v: VertexId,
    trials: u64,
    s: u64,
) -> Result<Estimate, WalkError> {
    if graph.is_boundary(v) {
        return Err(WalkError::BoundaryStart(v));
    }
    let hits: u64 = par_chunks(trials, ESCAPE_CHUNK, |range| {
        let mut walk = Lcrw::new(graph);
        range
            .filter(|&i| {
                let t = walk.run(v, u64::MAX, &mut seed::rng(seed::derive(s, i)), true);
                t.status == WalkStatus::HitBoundary
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(Estimate::from_count(hits, trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn single_edge_escapes_surely() {
        let g = build_graph(&[0, 1], &[1], &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(srw_escape_exact(&g, VertexId(0)).unwrap(), 1.0);
        assert_eq!(lcrw_escape_mc(&g, VertexId(0), 1000, 1).unwrap().mean, 1.0);
    }

    #[test]
    fn path_of_two() {
        // v - a - ∂: from a the walk exits or goes back with equal odds
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        assert!((srw_escape_exact(&g, VertexId(0)).unwrap() - 0.5).abs() < 1e-12);
        let est = lcrw_escape_mc(&g, VertexId(0), 20_000, 2).unwrap();
        assert!((est.mean - 0.5).abs() < 4.0 * est.stderr);
    }
}
