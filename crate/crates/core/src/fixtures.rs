//! Hand-built instances shipped with the crate.

use crate::graph::{parse_graph, DirectedMultigraph, EdgeId};
use crate::Arborescence;

pub const DISTRIBUTION_WITNESS: &str = include_str!("../fixtures/distribution_witness.json");
pub const STRICT_INCLUSION: &str = include_str!("../fixtures/strict_inclusion.json");
pub const NESTED_CONTRACTION: &str = include_str!("../fixtures/nested_contraction.json");

pub const SANDWICH: [(&str, &str); 5] = [
    (
        "two-cycle",
        include_str!("../fixtures/sandwich_two_cycle.json"),
    ),
    (
        "triangle",
        include_str!("../fixtures/sandwich_triangle.json"),
    ),
    ("nested", include_str!("../fixtures/sandwich_nested.json")),
    (
        "parallel",
        include_str!("../fixtures/sandwich_parallel.json"),
    ),
    ("acyclic", include_str!("../fixtures/sandwich_acyclic.json")),
];

/// Labels of the arborescence whose probability differs between
/// Exponential(1) weights (1/9) and Uniform(0,1) weights (7/60).
pub const DISTRIBUTION_TARGET: [u64; 3] = [1, 2, 3];

/// Label of the edge that is erased at large β without lying on a
/// contracted cycle.
pub const STRICT_INCLUSION_EDGE: u64 = 4;

/// Parses an embedded fixture; inline weights become a float vector
/// indexed by edge id (empty if the fixture carries none).
pub fn load(text: &str) -> (DirectedMultigraph, Vec<f64>) {
    let (g, file) = parse_graph(text).expect("embedded fixture parses");
    let weights = file
        .weights()
        .map(|w| g.edge_ids().map(|e| w[&g.edge_label(e)]).collect())
        .unwrap_or_default();
    (g, weights)
}

pub fn distribution_target(g: &DirectedMultigraph) -> Arborescence {
    let edges: Vec<EdgeId> = DISTRIBUTION_TARGET
        .iter()
        .map(|l| g.edge_by_label(*l).expect("target edge"))
        .collect();
    Arborescence::from_edges(g, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        for text in [DISTRIBUTION_WITNESS, STRICT_INCLUSION, NESTED_CONTRACTION]
            .into_iter()
            .chain(SANDWICH.map(|s| s.1))
        {
            load(text);
        }
        let (g, w) = load(DISTRIBUTION_WITNESS);
        assert!(w.is_empty());
        assert_eq!(distribution_target(&g).len(), 3);
    }
}
