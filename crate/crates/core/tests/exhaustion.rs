use std::collections::BTreeMap;

use cleb::exhaustion::{
    component_end_stats, connectivity_monotonicity_check, coupled_weights, wired_msa, GraphFamily,
    OffspringLaw,
};
use cleb::WeightModel;
use proptest::prelude::*;

fn by_label(g: &cleb::DirectedMultigraph, w: &[f64]) -> BTreeMap<u64, f64> {
    g.edge_ids()
        .map(|e| (g.edge_label(e), w[e.idx()]))
        .collect()
}

#[test]
fn planar_box_sizes() {
    let fam = GraphFamily::LatticeBox { d: 2 };
    for r in 1..6u64 {
        let g = fam.realize(r).unwrap();
        let side = 2 * r + 1;
        assert_eq!(g.num_vertices() as u64, side * side + 1);
        // undirected edges inside the ball plus those leaving it, both orientations
        assert_eq!(g.num_edges() as u64, 2 * (2 * side * (side - 1) + 4 * side));
    }
}

#[test]
fn tree_ball_sizes() {
    for arity in 2..=3u64 {
        let fam = GraphFamily::RegularTree {
            arity: arity as u32,
        };
        for r in 1..6u32 {
            let g = fam.realize(r as u64).unwrap();
            let interior: u64 = (0..=r).map(|k| arity.pow(k)).sum();
            assert_eq!(g.num_vertices() as u64, interior + 1);
        }
    }
}

#[test]
fn oversized_realizations_are_refused() {
    let fam = GraphFamily::LatticeBox { d: 3 };
    assert!(fam.realize(2000).is_err());
}

#[test]
fn tree_components_are_exported() {
    let fam = GraphFamily::RegularTree { arity: 3 };
    let g = fam.realize(4).unwrap();
    let mut sizes = Vec::new();
    for s in 0..20 {
        let msa = wired_msa(&g, &WeightModel::Exponential, s, &[fam.origin()]).unwrap();
        let comps = component_end_stats(&g, &msa);
        assert_eq!(
            comps.iter().map(|c| c.size).sum::<usize>(),
            g.num_vertices() - 1
        );
        sizes.push(comps.len());
    }
    assert!(sizes.iter().all(|k| *k >= 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weights_are_coupled_across_radii(s in any::<u64>(), r in 1u64..5) {
        let families = [
            GraphFamily::PathSegment,
            GraphFamily::LatticeBox { d: 2 },
            GraphFamily::RegularTree { arity: 3 },
            GraphFamily::GaltonWatson { law: OffspringLaw::Geometric { p: 0.5 }, seed: s },
            GraphFamily::BoundedSubdivision { base: Box::new(GraphFamily::LatticeBox { d: 2 }), max_len: 3, seed: s },
        ];
        for fam in &families {
            let small = fam.realize(r).unwrap();
            let large = fam.realize(r + 2).unwrap();
            let a = by_label(&small, coupled_weights(&small, &WeightModel::Exponential, s).unwrap().base());
            let b = by_label(&large, coupled_weights(&large, &WeightModel::Exponential, s).unwrap().base());
            // edges into the boundary are rewired, so compare interior-to-interior edges
            for e in small.edge_ids() {
                if small.is_boundary(small.head(e)) || small.is_boundary(small.tail(e)) {
                    continue;
                }
                let l = small.edge_label(e);
                prop_assert_eq!(a[&l], b[&l], "{:?} edge {}", fam, l);
            }
        }
    }

    #[test]
    fn random_families_are_stable_across_radii(s in any::<u64>()) {
        let fam = GraphFamily::GaltonWatson { law: OffspringLaw::Geometric { p: 0.6 }, seed: s };
        let small = fam.realize(3).unwrap();
        let large = fam.realize(5).unwrap();
        for v in small.interior() {
            let label = small.vertex_label(v);
            let w = large.vertex_by_label(label).unwrap();
            let out = |g: &cleb::DirectedMultigraph, v| {
                let mut l: Vec<u64> = g.out_edges(v).iter().map(|e| g.edge_label(*e)).collect();
                l.sort();
                l
            };
            prop_assert_eq!(out(&small, v), out(&large, w));
        }
    }

    #[test]
    fn connections_never_break(s in any::<u64>()) {
        let fam = GraphFamily::LatticeBox { d: 2 };
        let site = |x: i64, y: i64| fam.lattice_site(&[x, y]).unwrap();
        let pairs = [(site(0, 0), site(1, 0)), (site(-1, 1), site(1, -1)), (site(0, 0), site(0, 1))];
        let v = connectivity_monotonicity_check(&fam, &WeightModel::Uniform, &[1, 2, 3, 4], &pairs, s, 3).unwrap();
        prop_assert!(v.passed(), "{:?}", v.violations);
    }
}
