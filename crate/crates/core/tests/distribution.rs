//! The distribution witness: its target event equals an explicit system of
//! inequalities, whose probabilities are computed here by quadrature.

use cleb::fixtures;
use cleb::oracle::brute_force_msa;
use proptest::prelude::*;

/// Target {1,2,3} is the MSA iff, writing X_i for the weight of label i,
/// vertex 0 prefers its direct exit and 1→2→∂ beats every other choice
/// for vertices 1 and 2.
fn event(x: &[f64; 8]) -> bool {
    x[1] < x[6] && x[3] < x[4] && x[3] < x[5] && x[2] + x[3] < x[4] + x[7] && x[2] + x[3] < x[5] + x[7]
}

fn midpoint(n: usize, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

#[test]
fn exponential_probability_by_quadrature() {
    // X1 < X6 gives 1/2 and X3 < X4 ∧ X5 gives 1/3. Given that, the
    // overshoots are i.i.d. Exp(1) and the rest is P(X2 - X7 < M) with
    // M = min of the two overshoots ~ Exp(2) and X2 - X7 Laplace.
    let laplace_cdf = |m: f64| 1.0 - 0.5 * (-m).exp();
    let p = midpoint(200_000, |m| 2.0 * (-2.0 * m).exp() * laplace_cdf(m), 0.0, 40.0);
    let total = 0.5 * p / 3.0;
    assert!((total - 1.0 / 9.0).abs() < 1e-8, "{total}");
}

#[test]
fn uniform_probability_by_quadrature() {
    // X1 < X6 gives 1/2; the X4/X5 symmetry gives 2. Integrate over
    // X3 = u < X4 = v < X5, with X2 - X7 < v - u.
    let diff_cdf = |a: f64| 1.0 - (1.0 - a).powi(2) / 2.0;
    let n = 2000;
    let inner = |v: f64| midpoint(n, |u| diff_cdf(v - u) * (1.0 - v), 0.0, v);
    let total = midpoint(n, inner, 0.0, 1.0);
    assert!((total - 7.0 / 60.0).abs() < 1e-6, "{total}");
}

proptest! {
    #[test]
    fn target_event_is_the_inequality_system(x in prop::array::uniform8(0.001f64..1.0)) {
        let (g, _) = fixtures::load(fixtures::DISTRIBUTION_WITNESS);
        let w: Vec<f64> = g.edge_ids().map(|e| x[g.edge_label(e) as usize]).collect();
        let Ok((arb, _)) = brute_force_msa(&g, &w, 1e-9) else { return Ok(()) };
        let is_target = arb.edges() == fixtures::distribution_target(&g).edges();
        prop_assert_eq!(is_target, event(&x));
    }
}
