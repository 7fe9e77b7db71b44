//! Named verification suites with pinned sizes. Report bodies depend only
//! on the suite name and the master seed.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cleb::{
    cleb_walk, cleb_walk_algorithm, colored_exposure_set, original_cleb, recover_branch,
    sequential_cleb, Chooser, FixedOrder, RandomOrder,
};
use crate::exhaustion::{
    connectivity_monotonicity_check, increment_balance, transience_trace, wired_msa_sequence,
    GraphFamily,
};
use crate::fixtures;
use crate::graph::{bidirected, build_graph, VertexId};
use crate::instances::{escape_fixtures, random_instance, random_symmetric};
use crate::oracle::{
    brute_force_msa, eligible_perturbation, kruskal, msa_event_probability, perturb_and_verify,
    PerturbMode,
};
use crate::seed;
use crate::walks::{
    invasion_equivalence_check, lcrw_equals_cleb_check, lcrw_escape_mc, srw_escape_exact,
    wilson_sandwich_trial, DEFAULT_LERW_STEP_CAP,
};
use crate::weights::WeightModel;
use crate::{Rational, WeightAssignment, TIE_TOLERANCE};

pub const DEFAULT_SEED: u64 = 20_240_601;

pub const SUITES: [&str; 12] = [
    "oracle-equivalence",
    "distribution",
    "color-invariance",
    "invasion",
    "recovery",
    "escape",
    "recurrence",
    "sandwich",
    "monotonicity",
    "stabilization",
    "perturbation",
    "lcrw-law",
];

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("unknown suite '{0}' (known: {known})", known = SUITES.join(", "))]
    UnknownSuite(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub lines: Vec<String>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            lines: Vec::new(),
            passed: true,
        }
    }

    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn check(&mut self, ok: bool, line: impl Into<String>) {
        self.passed &= ok;
        self.lines.push(format!(
            "[{}] {}",
            if ok { "ok" } else { "FAIL" },
            line.into()
        ));
    }

    fn error(&mut self, context: &str, e: impl std::fmt::Display) {
        self.check(false, format!("{context}: {e}"));
    }

    pub fn body(&self) -> String {
        let mut out = format!("suite: {}\nseed: {}\n", self.suite, self.seed);
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "verdict: {}",
            if self.passed { "PASS" } else { "FAIL" }
        );
        out
    }
}

pub fn run_suite(name: &str, s: u64) -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new(name, s);
    match name {
        "oracle-equivalence" => oracle_equivalence(&mut r, s),
        "distribution" => distribution(&mut r, s),
        "color-invariance" => color_invariance(&mut r, s),
        "invasion" => invasion(&mut r, s),
        "recovery" => recovery(&mut r, s),
        "escape" => escape(&mut r, s),
        "recurrence" => recurrence(&mut r, s),
        "sandwich" => sandwich(&mut r, s),
        "monotonicity" => monotonicity(&mut r, s),
        "stabilization" => stabilization(&mut r, s),
        "perturbation" => perturbation(&mut r, s),
        "lcrw-law" => lcrw_law(&mut r, s),
        other => return Err(VerifyError::UnknownSuite(other.to_string())),
    }
    Ok(r)
}

fn as_f64(w: &[Rational]) -> Vec<f64> {
    w.iter()
        .map(|r| *r.numer() as f64 / *r.denom() as f64)
        .collect()
}

fn oracle_equivalence(r: &mut SuiteReport, s: u64) {
    const N: u64 = 200;
    let mut agree = 0;
    for i in 0..N {
        let si = seed::derive(s, i);
        let (g, w) = random_instance(si, 7, 20);
        let truth = match brute_force_msa(&g, &as_f64(&w), TIE_TOLERANCE) {
            Ok((t, _)) => t.edges(),
            Err(e) => {
                r.error(&format!("instance {i}"), e);
                continue;
            }
        };
        let a = WeightAssignment::new(w);
        let mut orders: Vec<(&str, Box<dyn Chooser>)> = vec![
            ("forward", Box::new(FixedOrder::forward(&g))),
            ("reverse", Box::new(FixedOrder::reverse(&g))),
            ("random", Box::new(RandomOrder::new(seed::derive(si, 1)))),
        ];
        let mut results = vec![("original", original_cleb(&g, a.clone()).map(|x| x.0))];
        for (name, ch) in orders.iter_mut() {
            results.push((
                name,
                sequential_cleb(&g, a.clone(), ch.as_mut()).map(|x| x.0),
            ));
        }
        let order: Vec<VertexId> = g.interior().collect();
        results.push((
            "walk",
            cleb_walk_algorithm(&g, a.clone(), &order).map(|x| x.0),
        ));
        let mut ok = true;
        for (name, res) in results {
            match res {
                Ok(t) if t.edges() == truth => {}
                Ok(_) => {
                    ok = false;
                    r.check(
                        false,
                        format!("instance {i}: {name} differs from brute force"),
                    );
                }
                Err(e) => {
                    ok = false;
                    r.error(&format!("instance {i}: {name}"), e);
                }
            }
        }
        agree += ok as u64;
    }
    r.check(agree == N, format!("{agree}/{N} instances: original, three sequential orders and the CLEB walk algorithm equal the brute-force MSA"));
}

fn distribution(r: &mut SuiteReport, s: u64) {
    const SAMPLES: u64 = 1_000_000;
    let (g, _) = fixtures::load(fixtures::DISTRIBUTION_WITNESS);
    let target = fixtures::distribution_target(&g);
    let exp = msa_event_probability(
        &g,
        &target,
        &WeightModel::Exponential,
        SAMPLES,
        seed::derive_named(s, "exp1"),
    );
    let unif = msa_event_probability(
        &g,
        &target,
        &WeightModel::Uniform,
        SAMPLES,
        seed::derive_named(s, "unif01"),
    );
    match (exp, unif) {
        (Ok(e), Ok(u)) => {
            r.check(
                (e.mean - 1.0 / 9.0).abs() <= 0.003,
                format!(
                    "exp1: {:.6} ± {:.6} vs 1/9 = {:.6}",
                    e.mean,
                    e.stderr,
                    1.0 / 9.0
                ),
            );
            r.check(
                (u.mean - 7.0 / 60.0).abs() <= 0.003,
                format!(
                    "unif01: {:.6} ± {:.6} vs 7/60 = {:.6}",
                    u.mean,
                    u.stderr,
                    7.0 / 60.0
                ),
            );
            r.check(
                e.mean < u.mean,
                format!(
                    "exp1 estimate below unif01 estimate by {:.6}",
                    u.mean - e.mean
                ),
            );
        }
        (Err(e), _) | (_, Err(e)) => r.error("estimate", e),
    }
}

fn color_invariance(r: &mut SuiteReport, s: u64) {
    const N: u64 = 100;
    let mut matching = 0;
    for i in 0..N {
        let si = seed::derive(s, i);
        let (g, w) = random_instance(si, 7, 20);
        let a = WeightAssignment::new(w);
        let reference = match original_cleb(&g, a.clone()) {
            Ok((_, log)) => colored_exposure_set(&log),
            Err(e) => {
                r.error(&format!("instance {i}: original"), e);
                continue;
            }
        };
        matching += 1;
        let choosers: Vec<Box<dyn Chooser>> = vec![
            Box::new(FixedOrder::forward(&g)),
            Box::new(FixedOrder::reverse(&g)),
            Box::new(RandomOrder::new(seed::derive(si, 1))),
        ];
        for (k, mut ch) in choosers.into_iter().enumerate() {
            match sequential_cleb(&g, a.clone(), ch.as_mut()) {
                Ok((_, log)) if colored_exposure_set(&log) == reference => matching += 1,
                Ok(_) => r.check(
                    false,
                    format!("instance {i}: order {k} exposes a different colored set"),
                ),
                Err(e) => r.error(&format!("instance {i}: order {k}"), e),
            }
        }
    }
    r.check(matching == 4 * N, format!("{matching}/{} runs (original and three orders per instance) share the original's colored exposure set", 4 * N));
}

fn invasion(r: &mut SuiteReport, s: u64) {
    const N: u64 = 100;
    let mut ok = 0;
    for i in 0..N {
        let (n, edges, w) = random_symmetric(seed::derive(s, i), 8);
        let g = bidirected(n, &edges).expect("valid instance");
        let both: Vec<f64> = w.iter().flat_map(|x| [*x, *x]).collect();
        match invasion_equivalence_check(&g, &both, VertexId(0)) {
            Ok(v) => {
                let mut mst: Vec<u64> = kruskal(n, &edges, &w)
                    .into_iter()
                    .map(|k| k as u64)
                    .collect();
                mst.sort();
                let mut last: Vec<u64> = v.walk.clone();
                last.sort();
                if v.equal && last == mst {
                    ok += 1;
                } else {
                    r.check(
                        false,
                        format!(
                            "instance {i}: invasion {:?}, walk {:?}, kruskal {mst:?}",
                            v.invasion, v.walk
                        ),
                    );
                }
            }
            Err(e) => r.error(&format!("instance {i}"), e),
        }
    }
    r.check(ok == N, format!("{ok}/{N} instances: fresh exposures of the CLEB walk follow invasion percolation and end at the Kruskal tree"));
}

fn recovery(r: &mut SuiteReport, s: u64) {
    const N: u64 = 100;
    let mut ok = 0;
    for i in 0..N {
        let si = seed::derive(s, i);
        let (g, w) = random_instance(si, 7, 20);
        let interior: Vec<VertexId> = g.interior().collect();
        let v = interior[(seed::derive(si, 2) % interior.len() as u64) as usize];
        let truth = match brute_force_msa(&g, &as_f64(&w), TIE_TOLERANCE) {
            Ok((t, _)) => t,
            Err(e) => {
                r.error(&format!("instance {i}"), e);
                continue;
            }
        };
        let branch = cleb_walk(&g, WeightAssignment::new(w), v, u64::MAX)
            .and_then(|rec| recover_branch(&g, &rec));
        match branch {
            Ok(b) => {
                let into = b
                    .gamma
                    .iter()
                    .filter(|(_, e)| g.is_boundary(g.head(*e)))
                    .count();
                if b.gamma.is_subset_of(&truth) && into == 1 {
                    ok += 1;
                } else {
                    r.check(false, format!("instance {i}: branch from {v} not contained or {into} edges into the boundary"));
                }
            }
            Err(e) => r.error(&format!("instance {i}"), e),
        }
    }
    r.check(
        ok == N,
        format!(
            "{ok}/{N} instances: recovered branch lies in the MSA with one edge into the boundary"
        ),
    );
}

fn escape(r: &mut SuiteReport, s: u64) {
    const TRIALS: u64 = 100_000;
    let mut all = true;
    for (fi, (name, g)) in escape_fixtures().into_iter().enumerate() {
        let (mut pass, mut total) = (0, 0);
        let mut worst = f64::INFINITY;
        for v in g.interior() {
            total += 1;
            let exact = srw_escape_exact(&g, v);
            let mc = lcrw_escape_mc(
                &g,
                v,
                TRIALS,
                seed::derive(s, (fi as u64) << 32 | v.0 as u64),
            );
            match (exact, mc) {
                (Ok(x), Ok(m)) => {
                    let margin = (m.mean - x) / m.stderr.max(f64::MIN_POSITIVE);
                    let margin = if m.mean == x { 0.0 } else { margin };
                    worst = worst.min(margin);
                    if m.mean >= x - 3.0 * m.stderr {
                        pass += 1;
                    } else {
                        r.check(
                            false,
                            format!(
                                "{name} start {v}: lcrw {:.5} ± {:.5} below srw {:.5}",
                                m.mean, m.stderr, x
                            ),
                        );
                    }
                }
                (Err(e), _) | (_, Err(e)) => r.error(&format!("{name} start {v}"), e),
            }
        }
        all &= pass == total;
        r.note(format!(
            "{name}: {pass}/{total} start vertices, smallest (lcrw - srw)/stderr = {worst:.2}"
        ));
    }
    r.check(all, "LCRW escape estimate is at least the exact SRW escape probability minus 3 stderr everywhere");
}

fn recurrence(r: &mut SuiteReport, s: u64) {
    const INCREMENTS: u64 = 100_000;
    const CRITICAL: f64 = 6.635;
    let fam = GraphFamily::PathSegment;
    let mut traces = Vec::new();
    let mut counted = 0u64;
    let mut k = 0;
    while counted < INCREMENTS {
        match transience_trace(&fam, 100, fam.origin(), 10_000_000, seed::derive(s, k)) {
            Ok((_, t, _)) => {
                let b = increment_balance(std::iter::once(&t), u64::MAX);
                counted += b.up + b.down + b.other;
                traces.push(t);
            }
            Err(e) => return r.error("trace", e),
        }
        k += 1;
    }
    let b = increment_balance(traces.iter(), INCREMENTS);
    r.note(format!("{k} walks on the wired segment [-100, 100]"));
    r.check(
        b.other == 0,
        format!("all {} increments are ±1", b.up + b.down + b.other),
    );
    r.check(
        b.chi_square < CRITICAL,
        format!(
            "+1: {}, -1: {}, chi-square {:.4} < {CRITICAL}",
            b.up, b.down, b.chi_square
        ),
    );
    r.check(
        b.up + b.down + b.other == INCREMENTS,
        format!("{INCREMENTS} increments counted"),
    );
}

fn sandwich(r: &mut SuiteReport, s: u64) {
    const TRIALS: u64 = 2000;
    const BETAS: [f64; 4] = [2.0, 5.0, 10.0, 20.0];
    for (k, (name, text)) in fixtures::SANDWICH.iter().enumerate() {
        let (g, w) = fixtures::load(text);
        match wilson_sandwich_trial(
            &g,
            &w,
            VertexId(0),
            &BETAS,
            TRIALS,
            seed::derive(s, k as u64),
            DEFAULT_LERW_STEP_CAP,
        ) {
            Ok(rep) => {
                r.check(
                    rep.e_cleb.is_subset(&rep.e_bar),
                    format!("{name}: E_CLEB ⊆ Ē_CLEB"),
                );
                let freqs: Vec<String> = rep
                    .rows
                    .iter()
                    .map(|row| {
                        format!(
                            "β={} {:.4}±{:.4} capped {}",
                            row.beta, row.frequency, row.stderr, row.capped
                        )
                    })
                    .collect();
                r.note(format!("{name}: {}", freqs.join(", ")));
                let mono = rep.rows.windows(2).all(|p| {
                    p[1].frequency
                        >= p[0].frequency - 3.0 * (p[0].stderr.powi(2) + p[1].stderr.powi(2)).sqrt()
                });
                r.check(
                    mono,
                    format!("{name}: frequency nondecreasing in β within 3 stderr"),
                );
                let last = rep.rows.last().expect("four rows");
                r.check(
                    last.frequency >= 0.95,
                    format!("{name}: {:.4} ≥ 0.95 at β = 20", last.frequency),
                );
            }
            Err(e) => r.error(name, e),
        }
    }
    let (g, w) = fixtures::load(fixtures::STRICT_INCLUSION);
    let edge = g
        .edge_by_label(fixtures::STRICT_INCLUSION_EDGE)
        .expect("fixture edge");
    match wilson_sandwich_trial(
        &g,
        &w,
        VertexId(0),
        &[20.0],
        TRIALS,
        seed::derive_named(s, "strict"),
        DEFAULT_LERW_STEP_CAP,
    ) {
        Ok(rep) => {
            let erased = rep.rows[0]
                .erased_counts
                .get(&fixtures::STRICT_INCLUSION_EDGE)
                .copied()
                .unwrap_or(0);
            let frac = if rep.e_cleb.contains(&edge) {
                0.0
            } else {
                erased as f64 / TRIALS as f64
            };
            r.check(frac >= 0.9, format!("strict inclusion: edge {} erased and outside E_CLEB in {:.4} of runs at β = 20", fixtures::STRICT_INCLUSION_EDGE, frac));
        }
        Err(e) => r.error("strict inclusion", e),
    }
}

fn monotonicity(r: &mut SuiteReport, s: u64) {
    const SEEDS: u64 = 50;
    let tree = GraphFamily::RegularTree { arity: 3 };
    let tree_pairs: Vec<(u64, u64)> = (0..10u32)
        .map(|k| {
            let a = tree.tree_site(&[k % 3]).expect("tree");
            let b = tree.tree_site(&[(k / 3) % 3, (k + 1) % 3]).expect("tree");
            (a, b)
        })
        .collect();
    let path = GraphFamily::PathSegment;
    let path_pairs: Vec<(u64, u64)> = (0..10i64)
        .map(|k| {
            (
                path.lattice_site(&[k - 5]).expect("site"),
                path.lattice_site(&[2 * k - 9]).expect("site"),
            )
        })
        .collect();
    let cases = [
        ("tree:3", &tree, [2u64, 3, 4, 5, 6], &tree_pairs),
        ("path", &path, [10, 20, 30, 40, 50], &path_pairs),
    ];
    for (name, fam, radii, pairs) in cases {
        match connectivity_monotonicity_check(
            fam,
            &WeightModel::Exponential,
            &radii,
            pairs,
            seed::derive_named(s, name),
            SEEDS,
        ) {
            Ok(v) => {
                for viol in v.violations.iter().take(10) {
                    r.note(format!("{name}: violation {viol:?}"));
                }
                r.check(
                    v.passed(),
                    format!(
                        "{name}: {} decreases over {} comparisons ({} connected observations)",
                        v.violations.len(),
                        v.comparisons,
                        v.connected
                    ),
                );
            }
            Err(e) => r.error(name, e),
        }
    }
}

fn stabilization(r: &mut SuiteReport, s: u64) {
    let tree = GraphFamily::RegularTree { arity: 2 };
    match wired_msa_sequence(
        &tree,
        &WeightModel::Exponential,
        &[8, 10, 12],
        &[tree.origin()],
        s,
        200,
    ) {
        Ok(rep) => {
            let a = rep.agreement();
            r.check(
                a >= 0.99,
                format!(
                    "tree:2 root edge identical at radii 8, 10, 12 for {:.3} of 200 seeds",
                    a
                ),
            );
            let distinct: std::collections::BTreeSet<u64> = rep
                .histories
                .iter()
                .filter_map(|h| h.edges.last().copied())
                .collect();
            r.note(format!(
                "tree:2 distinct root edges at radius 12 across seeds: {}",
                distinct.len()
            ));
        }
        Err(e) => r.error("tree:2", e),
    }
    let path = GraphFamily::PathSegment;
    match wired_msa_sequence(&path, &WeightModel::Exponential, &[10, 20, 40, 60, 80, 100], &[path.origin()], s, 200) {
        Ok(rep) => r.note(format!(
            "path (descriptive): centre edge constant over radii 10..100 for {:.3} of 200 seeds, changed at radius 100 for {}",
            rep.agreement(),
            rep.histories.iter().filter(|h| h.censored()).count()
        )),
        Err(e) => r.error("path", e),
    }
}

fn perturbation(r: &mut SuiteReport, s: u64) {
    const N: u64 = 100;
    for (mode, name) in [
        (PerturbMode::Futures, "futures"),
        (PerturbMode::WalkEpoch, "walk-epoch"),
    ] {
        let (mut found, mut ok, mut i) = (0, 0, 0u64);
        while found < N {
            let si = seed::derive(s, i);
            i += 1;
            let Some(c) = eligible_perturbation(si, 7, 20) else {
                continue;
            };
            found += 1;
            match perturb_and_verify(&c.graph, &c.weights, c.e1, c.e2, mode) {
                Ok(v) if v.matched() => ok += 1,
                Ok(v) => r.check(
                    false,
                    format!(
                        "{name} case {found}: expected {:?}, got {:?}",
                        v.expected, v.obtained
                    ),
                ),
                Err(e) => r.error(&format!("{name} case {found}"), e),
            }
        }
        r.check(ok == N, format!("{name}: {ok}/{N} perturbed MSAs equal T* with e1 swapped for e2 ({i} instances drawn)"));
    }
}

fn lcrw_law(r: &mut SuiteReport, s: u64) {
    const TRIALS: u64 = 100_000;
    // x ⇄ y with exits from both, one of them doubled
    let g =
        build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (0, 2), (1, 2), (1, 2)]).expect("valid");
    match lcrw_equals_cleb_check(&g, VertexId(0), TRIALS, s) {
        Ok(tv) => r.check(
            tv.tv <= 3.0 * tv.stderr,
            format!(
                "two-cycle with exits: TV {:.5} ≤ 3 × {:.5} over {} sequences",
                tv.tv, tv.stderr, tv.outcomes
            ),
        ),
        Err(e) => r.error("two-cycle", e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert_eq!(
            run_suite("nope", 1).unwrap_err(),
            VerifyError::UnknownSuite("nope".into())
        );
    }
}
