use cleb::graph::{parse_graph, save_graph};
use cleb::instances::random_instance;
use cleb::{sample_weights, WeightModel, Weights};
use proptest::prelude::*;

proptest! {
    #[test]
    fn save_then_parse_round_trips(s in any::<u64>()) {
        let (g, w) = random_instance(s, 7, 20);
        let f: Vec<f64> = w.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect();
        let text = save_graph(&g, Some(&f));
        let (h, file) = parse_graph(&text).unwrap();
        prop_assert_eq!(g.edge_labels(), h.edge_labels());
        for e in g.edge_ids() {
            prop_assert_eq!(g.vertex_label(g.tail(e)), h.vertex_label(h.tail(e)));
            prop_assert_eq!(g.vertex_label(g.head(e)), h.vertex_label(h.head(e)));
        }
        let inline = file.weights().unwrap();
        prop_assert!(g.edge_ids().all(|e| inline[&g.edge_label(e)] == f[e.idx()]));
    }

    #[test]
    fn sampled_weights_depend_only_on_seed_and_label(s in any::<u64>()) {
        let (g, _) = random_instance(s, 7, 20);
        let (h, _) = random_instance(s ^ 0xabc, 7, 20);
        let a: Weights = sample_weights(&WeightModel::Exponential, &g, 99).unwrap();
        let b: Weights = sample_weights(&WeightModel::Exponential, &h, 99).unwrap();
        for e in g.edge_ids() {
            if let Some(f) = h.edge_by_label(g.edge_label(e)) {
                prop_assert_eq!(a.base()[e.idx()], b.base()[f.idx()]);
            }
        }
        prop_assert!(a.base().iter().all(|x| *x > 0.0));
    }
}

#[test]
fn fixture_files_load() {
    for text in [
        cleb::fixtures::DISTRIBUTION_WITNESS,
        cleb::fixtures::STRICT_INCLUSION,
        cleb::fixtures::NESTED_CONTRACTION,
    ] {
        let (g, _) = parse_graph(text).unwrap();
        assert_eq!(g.boundary().len(), 1);
    }
}
