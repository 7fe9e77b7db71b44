//! Exhaustive enumeration and the matrix-tree count.

use crate::arborescence::Arborescence;
use crate::graph::{DirectedMultigraph, EdgeId, VertexId};
use crate::scalar::Scalar;

use super::OracleError;

/// All spanning arborescences as edge lists (one edge per interior vertex,
/// interior vertices in increasing order), in lexicographic order of the
/// per-vertex choices.
pub fn enumerate_edge_sets(
    graph: &DirectedMultigraph,
    cap: u64,
) -> Result<Vec<Vec<EdgeId>>, OracleError> {
    let interior: Vec<VertexId> = graph.interior().collect();
    let product = interior.iter().fold(1u64, |acc, v| {
        acc.saturating_mul(graph.out_edges(*v).len() as u64)
    });
    if product > cap {
        return Err(OracleError::TooLarge(product));
    }
    let mut chosen: Vec<Option<EdgeId>> = vec![None; graph.num_vertices()];
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(interior.len());
    descend(graph, &interior, 0, &mut chosen, &mut current, &mut out);
    Ok(out)
}

fn closes_cycle(graph: &DirectedMultigraph, chosen: &[Option<EdgeId>], v: VertexId) -> bool {
    let mut x = v;
    while let Some(e) = chosen[x.idx()] {
        x = graph.head(e);
        if x == v {
            return true;
        }
    }
    false
}

fn descend(
    graph: &DirectedMultigraph,
    interior: &[VertexId],
    i: usize,
    chosen: &mut Vec<Option<EdgeId>>,
    current: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
) {
    let Some(&v) = interior.get(i) else {
        out.push(current.clone());
        return;
    };
    for &e in graph.out_edges(v) {
        chosen[v.idx()] = Some(e);
        if !closes_cycle(graph, chosen, v) {
            current.push(e);
            descend(graph, interior, i + 1, chosen, current, out);
            current.pop();
        }
    }
    chosen[v.idx()] = None;
}

pub fn enumerate_arborescences(
    graph: &DirectedMultigraph,
    cap: u64,
) -> Result<Vec<Arborescence>, OracleError> {
    Ok(enumerate_edge_sets(graph, cap)?
        .into_iter()
        .map(|set| Arborescence::from_edges(graph, set))
        .collect())
}

/// Number of spanning arborescences from the directed matrix-tree theorem,
/// computed exactly with fraction-free (Bareiss) elimination.
pub fn matrix_tree_count(graph: &DirectedMultigraph) -> i128 {
    let interior: Vec<VertexId> = graph.interior().collect();
    let n = interior.len();
    let mut index = vec![usize::MAX; graph.num_vertices()];
    for (i, v) in interior.iter().enumerate() {
        index[v.idx()] = i;
    }
    let mut m = vec![vec![0i128; n]; n];
    for (i, v) in interior.iter().enumerate() {
        for &e in graph.out_edges(*v) {
            m[i][i] += 1;
            let h = graph.head(e);
            if !graph.is_boundary(h) {
                m[i][index[h.idx()]] -= 1;
            }
        }
    }
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Index of the minimum-weight set; a tie with the runner-up is an error.
pub fn minimum_index<S: Scalar>(
    sets: &[Vec<EdgeId>],
    weights: &[S],
    tol: f64,
) -> Result<usize, OracleError> {
    let totals: Vec<S> = sets
        .iter()
        .map(|set| {
            set.iter()
                .fold(S::zero(), |acc, e| acc + weights[e.idx()].clone())
        })
        .collect();
    let mut best: Option<usize> = None;
    let mut second: Option<usize> = None;
    for i in 0..totals.len() {
        match best {
            None => best = Some(i),
            Some(b) if totals[i] < totals[b] => {
                second = best;
                best = Some(i);
            }
            Some(_) => {
                if second.is_none_or(|s| totals[i] < totals[s]) {
                    second = Some(i);
                }
            }
        }
    }
    let best = best.ok_or(OracleError::NoArborescence)?;
    if let Some(s) = second {
        if totals[best].ties_with(&totals[s], tol) {
            return Err(OracleError::TieDetected(best.min(s), best.max(s)));
        }
    }
    Ok(best)
}

/// The unique minimum-weight spanning arborescence and its weight.
pub fn brute_force_msa<S: Scalar>(
    graph: &DirectedMultigraph,
    weights: &[S],
    tol: f64,
) -> Result<(Arborescence, S), OracleError> {
    let sets = enumerate_edge_sets(graph, super::DEFAULT_ENUMERATION_CAP)?;
    let i = minimum_index(&sets, weights, tol)?;
    let total = sets[i]
        .iter()
        .fold(S::zero(), |acc, e| acc + weights[e.idx()].clone());
    Ok((
        Arborescence::from_edges(graph, sets[i].iter().copied()),
        total,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::Rational;

    // u=0, v=1, ∂=2: u→v, v→u, u→∂, v→∂
    fn two_cycle() -> DirectedMultigraph {
        build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn two_cycle_has_three_arborescences() {
        let g = two_cycle();
        let all = enumerate_edge_sets(&g, 100).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(matrix_tree_count(&g), 3);
    }

    #[test]
    fn two_cycle_minimum() {
        let g = two_cycle();
        let w: Vec<Rational> = [2, 9, 5, 1]
            .iter()
            .map(|x| Rational::from_integer(*x))
            .collect();
        let (t, total) = brute_force_msa(&g, &w, 0.0).unwrap();
        assert_eq!(t.edges(), vec![EdgeId(0), EdgeId(3)]);
        assert_eq!(total, Rational::from_integer(3));
    }

    #[test]
    fn complete_bidirected_count_matches_determinant() {
        let mut edges = Vec::new();
        for a in 0..3u64 {
            for b in 0..3u64 {
                if a != b {
                    edges.push((a, b));
                }
            }
            edges.push((a, 3));
        }
        let g = build_graph(&[0, 1, 2, 3], &[3], &edges).unwrap();
        let n = enumerate_edge_sets(&g, 1000).unwrap().len() as i128;
        // rooted spanning trees of K4: 4^2 = 16
        assert_eq!(n, 16);
        assert_eq!(matrix_tree_count(&g), n);
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            enumerate_edge_sets(&two_cycle(), 3),
            Err(OracleError::TooLarge(4))
        );
    }
}
