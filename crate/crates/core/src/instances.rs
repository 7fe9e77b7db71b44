//! Seeded random instances and small fixed families used by the checks.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::graph::{DirectedMultigraph, GraphBuilder};
use crate::seed;
use crate::Rational;

/// Denominator of random rational weights. Numerators are drawn from a
/// range wide enough that integer relations among a handful of weights
/// essentially never vanish.
const DENOM: i64 = 1 << 20;

/// Random instance on at most `max_vertices` vertices (the last one is the
/// boundary) and at most `max_edges` edges. Every interior vertex has an
/// edge toward a higher vertex, so ∂ is reachable from everywhere.
pub fn random_instance(
    s: u64,
    max_vertices: usize,
    max_edges: usize,
) -> (DirectedMultigraph, Vec<Rational>) {
    let mut rng = seed::rng(s);
    let n = rng.random_range(2..=max_vertices.max(2)) as u64;
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b.add_vertex(v, v == n - 1).expect("fresh label");
    }
    let mut edges: Vec<(u64, u64)> = (0..n - 1)
        .map(|v| (v, rng.random_range(v + 1..n)))
        .collect();
    let target = rng.random_range(edges.len()..=max_edges.max(edges.len()));
    while edges.len() < target {
        let t = rng.random_range(0..n - 1);
        let h = rng.random_range(0..n);
        if t != h {
            edges.push((t, h));
        }
    }
    edges.shuffle(&mut rng);
    for (i, (t, h)) in edges.iter().enumerate() {
        b.add_edge(i as u64, *t, *h).expect("valid edge");
    }
    let weights = edges
        .iter()
        .map(|_| Rational::new(rng.random_range(DENOM..4 * DENOM), DENOM))
        .collect();
    (b.build().expect("has boundary"), weights)
}

/// Connected undirected instance on at most `max_vertices` vertices with
/// distinct weights per unoriented edge: (n, edges, weights).
pub fn random_symmetric(s: u64, max_vertices: usize) -> (usize, Vec<(u64, u64)>, Vec<f64>) {
    let mut rng = seed::rng(s);
    let n = rng.random_range(2..=max_vertices.max(2));
    let mut edges: Vec<(u64, u64)> = (1..n as u64).map(|v| (rng.random_range(0..v), v)).collect();
    let extra = rng.random_range(0..=n);
    for _ in 0..extra {
        let a = rng.random_range(0..n as u64);
        let b = rng.random_range(0..n as u64);
        if a != b {
            edges.push((a, b));
        }
    }
    edges.shuffle(&mut rng);
    let weights = edges.iter().map(|_| rng.random::<f64>()).collect();
    (n, edges, weights)
}

/// A finite rooted tree given by parent pointers (`parent[0]` is ignored),
/// with every leaf glued into one boundary vertex. Vertex labels are the
/// tree indices of the internal vertices; the boundary has label `u64::MAX`.
/// Each tree edge appears in both orientations.
pub fn glued_tree(parent: &[usize]) -> DirectedMultigraph {
    let n = parent.len();
    let mut children = vec![0usize; n];
    for &p in &parent[1..] {
        children[p] += 1;
    }
    // a lone root is not a leaf to glue
    let leaf = |v: usize| v != 0 && children[v] == 0;
    let mut b = GraphBuilder::new();
    for v in 0..n {
        if !leaf(v) {
            b.add_vertex(v as u64, false).expect("fresh label");
        }
    }
    b.add_vertex(u64::MAX, true).expect("fresh label");
    let label = |v: usize| if leaf(v) { u64::MAX } else { v as u64 };
    for (c, &p) in parent.iter().enumerate().skip(1) {
        b.add_edge(2 * c as u64, label(c), label(p))
            .expect("valid edge");
        b.add_edge(2 * c as u64 + 1, label(p), label(c))
            .expect("valid edge");
    }
    b.build().expect("has boundary")
}

/// Parent array of the complete `arity`-ary tree of the given depth.
pub fn regular_tree_parents(arity: usize, depth: usize) -> Vec<usize> {
    let mut parent = vec![0usize];
    let mut level = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &p in &level {
            for _ in 0..arity {
                next.push(parent.len());
                parent.push(p);
            }
        }
        level = next;
    }
    parent
}

/// Ten glued trees: complete trees of depth 1–4 with arity 2 and 3, plus
/// two irregular ones.
pub fn escape_fixtures() -> Vec<(String, DirectedMultigraph)> {
    let mut out = Vec::new();
    for depth in 1..=4 {
        for arity in 2..=3 {
            out.push((
                format!("regular-a{arity}-d{depth}"),
                glued_tree(&regular_tree_parents(arity, depth)),
            ));
        }
    }
    // root with a long arm and a bushy arm
    out.push((
        "lopsided".into(),
        glued_tree(&[0, 0, 1, 2, 3, 0, 5, 5, 5, 6, 6]),
    ));
    // caterpillar: a spine with one or two leaves per spine vertex
    out.push((
        "caterpillar".into(),
        glued_tree(&[0, 0, 1, 2, 3, 0, 1, 1, 2, 3, 3, 4]),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_instances_are_deterministic() {
        let (g1, w1) = random_instance(5, 7, 20);
        let (g2, w2) = random_instance(5, 7, 20);
        assert_eq!(g1.edge_labels(), g2.edge_labels());
        assert_eq!(w1, w2);
        assert!(g1.num_edges() <= 20 && g1.num_vertices() <= 7);
    }

    #[test]
    fn glued_binary_tree() {
        let g = glued_tree(&regular_tree_parents(2, 2));
        // root, two internal children, ∂
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.num_edges(), 12);
        assert_eq!(escape_fixtures().len(), 10);
    }
}
