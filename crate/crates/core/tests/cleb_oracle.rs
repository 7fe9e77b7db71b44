//! CLEB variants against an independent exhaustive search written here,
//! and against the library's brute-force oracle.

use cleb::cleb::{
    cleb_walk, colored_exposure_set, original_cleb, recover_branch, sequential_cleb, FixedOrder,
    RandomOrder,
};
use cleb::fixtures;
use cleb::graph::{DirectedMultigraph, EdgeId, VertexId};
use cleb::instances::random_instance;
use cleb::oracle::{brute_force_msa, enumerate_arborescences, matrix_tree_count};
use cleb::{validate_arborescence, Rational, WeightAssignment, TIE_TOLERANCE};
use proptest::prelude::*;

/// Tries every choice of one out-edge per interior vertex, keeps the
/// acyclic ones, and returns the sorted edge set of the cheapest.
fn exhaustive_msa(g: &DirectedMultigraph, w: &[Rational]) -> Vec<EdgeId> {
    let interior: Vec<VertexId> = g.interior().collect();
    let mut best: Option<(Rational, Vec<EdgeId>)> = None;
    let mut pick = vec![0usize; interior.len()];
    loop {
        let choice: Vec<EdgeId> = interior
            .iter()
            .zip(&pick)
            .map(|(v, &k)| g.out_edges(*v)[k])
            .collect();
        let next = |v: VertexId| interior.iter().position(|x| *x == v).map(|i| choice[i]);
        let acyclic = interior.iter().all(|&v| {
            let mut x = v;
            for _ in 0..=interior.len() {
                match next(x) {
                    Some(e) => x = g.head(e),
                    None => return true,
                }
            }
            false
        });
        if acyclic {
            let total: Rational = choice.iter().map(|e| w[e.idx()]).sum();
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                let mut c = choice.clone();
                c.sort();
                best = Some((total, c));
            }
        }
        // odometer over out-edge choices
        let mut i = 0;
        loop {
            if i == interior.len() {
                return best.expect("boundary reachable").1;
            }
            pick[i] += 1;
            if pick[i] < g.out_edges(interior[i]).len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn nested_contraction_fixture() {
    let (g, w) = fixtures::load(fixtures::NESTED_CONTRACTION);
    let exact: Vec<Rational> = w
        .iter()
        .map(|x| Rational::from_integer(*x as i64))
        .collect();
    let truth = exhaustive_msa(&g, &exact);
    let labels: Vec<u64> = truth.iter().map(|e| g.edge_label(*e)).collect();
    assert_eq!(labels, vec![0, 2, 7, 8]);
    let (arb, log) = original_cleb(&g, WeightAssignment::new(exact.clone())).unwrap();
    assert_eq!(arb.edges(), truth);
    assert_eq!(
        brute_force_msa(&g, &exact, 0.0).unwrap().1,
        Rational::from_integer(12)
    );
    // a contracted cycle is itself contracted again
    assert!(log.cycles().len() >= 2);
}

#[test]
fn counts_agree_with_matrix_tree_theorem() {
    for s in 0..40 {
        let (g, _) = random_instance(s, 6, 14);
        assert_eq!(
            enumerate_arborescences(&g, 1 << 20).unwrap().len() as i128,
            matrix_tree_count(&g),
            "seed {s}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn every_variant_finds_the_exhaustive_minimum(s in any::<u64>()) {
        let (g, w) = random_instance(s, 6, 16);
        let truth = exhaustive_msa(&g, &w);
        let a = WeightAssignment::new(w.clone());
        prop_assert_eq!(original_cleb(&g, a.clone()).unwrap().0.edges(), truth.clone());
        prop_assert_eq!(sequential_cleb(&g, a.clone(), &mut FixedOrder::reverse(&g)).unwrap().0.edges(), truth.clone());
        prop_assert_eq!(sequential_cleb(&g, a.clone(), &mut RandomOrder::new(s ^ 1)).unwrap().0.edges(), truth.clone());
        let order: Vec<VertexId> = g.interior().collect();
        prop_assert_eq!(cleb::cleb::cleb_walk_algorithm(&g, a, &order).unwrap().0.edges(), truth.clone());
        prop_assert_eq!(brute_force_msa(&g, &w, TIE_TOLERANCE).unwrap().0.edges(), truth);
    }

    #[test]
    fn float_and_exact_runs_agree(s in any::<u64>()) {
        let (g, w) = random_instance(s, 7, 20);
        let f: Vec<f64> = w.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect();
        let exact = original_cleb(&g, WeightAssignment::new(w)).unwrap().0;
        let float = original_cleb(&g, WeightAssignment::new(f)).unwrap().0;
        prop_assert_eq!(exact.edges(), float.edges());
        prop_assert!(validate_arborescence(&g, &exact, true).is_ok());
    }

    #[test]
    fn shifting_one_vertex_keeps_the_argmin(s in any::<u64>(), shift in 1i64..50) {
        let (g, w) = random_instance(s, 5, 12);
        let before = brute_force_msa(&g, &w, 0.0).unwrap().0.edges();
        let v = g.interior().next().unwrap();
        let shifted: Vec<Rational> = g
            .edge_ids()
            .map(|e| if g.tail(e) == v { w[e.idx()] + Rational::from_integer(shift) } else { w[e.idx()] })
            .collect();
        prop_assert_eq!(brute_force_msa(&g, &shifted, 0.0).unwrap().0.edges(), before);
    }

    #[test]
    fn colored_exposures_do_not_depend_on_order(s in any::<u64>()) {
        let (g, w) = random_instance(s, 7, 20);
        let a = WeightAssignment::new(w);
        let reference = colored_exposure_set(&original_cleb(&g, a.clone()).unwrap().1);
        for k in 0..3 {
            let log = sequential_cleb(&g, a.clone(), &mut RandomOrder::new(s.wrapping_add(k))).unwrap().1;
            prop_assert_eq!(colored_exposure_set(&log), reference.clone());
        }
    }

    #[test]
    fn recovered_branch_is_part_of_the_msa(s in any::<u64>()) {
        let (g, w) = random_instance(s, 7, 20);
        let truth = brute_force_msa(&g, &w, 0.0).unwrap().0;
        for v in g.interior() {
            let rec = cleb_walk(&g, WeightAssignment::new(w.clone()), v, u64::MAX).unwrap();
            let b = recover_branch(&g, &rec).unwrap();
            prop_assert!(b.gamma.is_subset_of(&truth));
            prop_assert!(b.vertices.contains(&v));
            prop_assert_eq!(b.gamma.iter().filter(|(_, e)| g.is_boundary(g.head(*e))).count(), 1);
        }
    }
}
