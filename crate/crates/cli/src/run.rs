use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use cleb::cleb::{cleb_walk, original_cleb, sequential_cleb, FixedOrder};
use cleb::exhaustion::{
    connectivity_monotonicity_check, grid_trace, wired_msa_sequence, GraphFamily, TransienceSummary,
};
use cleb::graph::{load_graph, GraphFile};
use cleb::oracle::{brute_force_msa, distribution_report};
use cleb::verify::{run_suite, SUITES};
use cleb::walks::{
    invasion_equivalence_check, lcrw_run, wilson_sandwich_trial, DEFAULT_LERW_STEP_CAP,
};
use cleb::weights::WeightModel;
use cleb::{
    sample_weights, validate_arborescence, Arborescence, DirectedMultigraph, Rational, Scalar,
    VertexId, WeightAssignment, TIE_TOLERANCE,
};

use crate::config::{Algorithm, Cli, Command, Format, Settings};

/// Returns whether every check in the run passed.
pub fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Msa { common, algorithm } => msa(&Settings::resolve(&common)?, algorithm),
        Command::ClebWalk { common, start } => cleb_walk_cmd(&Settings::resolve(&common)?, start),
        Command::Lcrw {
            common,
            start,
            radius,
        } => lcrw(&Settings::resolve(&common)?, start, radius),
        Command::LcrwGrid { common, d, side } => lcrw_grid(&Settings::resolve(&common)?, d, side),
        Command::WilsonSandwich {
            common,
            betas,
            start,
        } => sandwich(&Settings::resolve(&common)?, &betas, start),
        Command::InvasionCheck { common, start } => invasion(&Settings::resolve(&common)?, start),
        Command::DistCompare {
            common,
            models,
            target,
        } => dist_compare(&Settings::resolve(&common)?, &models, target),
        Command::WiredLimit {
            common,
            probes,
            seeds,
        } => wired_limit(&Settings::resolve(&common)?, probes, seeds),
        Command::Connectivity {
            common,
            pairs,
            seeds,
        } => connectivity(&Settings::resolve(&common)?, &pairs, seeds),
        Command::Verify { common, suite } => verify(&Settings::resolve(&common)?, &suite),
    }
}

fn emit(s: &Settings, body: &str) -> Result<()> {
    match &s.out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn graph(s: &Settings) -> Result<(DirectedMultigraph, GraphFile)> {
    let path = s
        .graph
        .as_ref()
        .ok_or_else(|| anyhow!("--graph is required"))?;
    load_graph(path).with_context(|| format!("loading {}", path.display()))
}

fn family(s: &Settings) -> Result<&GraphFamily> {
    s.family
        .as_ref()
        .ok_or_else(|| anyhow!("--family is required"))
}

fn model(s: &Settings) -> Result<WeightModel> {
    Ok(WeightModel::parse(s.model.as_deref().unwrap_or("exp1"))?)
}

/// Weights from `--weights`, or else the graph file's inline weights.
fn weights(s: &Settings, g: &DirectedMultigraph, file: &GraphFile) -> Result<Vec<f64>> {
    if let Some(spec) = &s.model {
        let m = WeightModel::parse(spec)?;
        return Ok(sample_weights::<f64>(&m, g, s.seed)?.base().to_vec());
    }
    let inline = file
        .weights()
        .ok_or_else(|| anyhow!("no weights: pass --weights or give every edge a weight"))?;
    Ok(g.edge_ids().map(|e| inline[&g.edge_label(e)]).collect())
}

fn vertex(g: &DirectedMultigraph, label: Option<u64>) -> Result<VertexId> {
    match label {
        Some(l) => g
            .vertex_by_label(l)
            .filter(|v| !g.is_boundary(*v))
            .ok_or_else(|| anyhow!("start {l} is not an interior vertex")),
        None => g
            .interior()
            .next()
            .ok_or_else(|| anyhow!("graph has no interior vertex")),
    }
}

fn solve<S: Scalar>(
    g: &DirectedMultigraph,
    w: Vec<S>,
    algorithm: Algorithm,
) -> Result<Arborescence> {
    let a = WeightAssignment::new(w.clone());
    Ok(match algorithm {
        Algorithm::Original => original_cleb(g, a)?.0,
        Algorithm::Sequential => sequential_cleb(g, a, &mut FixedOrder::forward(g))?.0,
        Algorithm::Walk => {
            let order: Vec<VertexId> = g.interior().collect();
            cleb::cleb::cleb_walk_algorithm(g, a, &order)?.0
        }
        Algorithm::Brute => brute_force_msa(g, &w, TIE_TOLERANCE)?.0,
    })
}

fn msa(s: &Settings, algorithm: Algorithm) -> Result<bool> {
    let (g, file) = graph(s)?;
    let w = weights(s, &g, &file)?;
    // exact arithmetic whenever the values are given rather than sampled
    let arb = match s.model.as_deref().map(WeightModel::parse).transpose()? {
        Some(WeightModel::Fixed(fixed)) => {
            let exact = g
                .edge_ids()
                .map(|e| {
                    fixed
                        .get(&g.edge_label(e))
                        .copied()
                        .ok_or_else(|| anyhow!("edge {} has no weight", g.edge_label(e)))
                })
                .collect::<Result<Vec<Rational>>>()?;
            solve(&g, exact, algorithm)?
        }
        _ => solve(&g, w.clone(), algorithm)?,
    };
    let ok = validate_arborescence(&g, &arb, true).is_ok();
    let total: f64 = arb.edges().iter().map(|e| w[e.idx()]).sum();
    let rows: Vec<(u64, u64, u64, f64)> = arb
        .edges()
        .iter()
        .map(|e| {
            (
                g.edge_label(*e),
                g.vertex_label(g.tail(*e)),
                g.vertex_label(g.head(*e)),
                w[e.idx()],
            )
        })
        .collect();
    let body = match s.format {
        Format::Csv => {
            let mut out = String::from("edge,tail,head,weight\n");
            for (id, t, h, x) in &rows {
                let _ = writeln!(out, "{id},{t},{h},{x}");
            }
            out
        }
        Format::Json => {
            let edges: Vec<_> = rows
                .iter()
                .map(|(id, t, h, x)| json!({"edge": id, "tail": t, "head": h, "weight": x}))
                .collect();
            format!("{}\n", json!({"edges": edges, "total": total, "valid": ok}))
        }
    };
    emit(s, &body)?;
    Ok(ok)
}

fn cleb_walk_cmd(s: &Settings, start: Option<u64>) -> Result<bool> {
    let (g, file) = graph(s)?;
    let w = weights(s, &g, &file)?;
    let v = vertex(&g, start)?;
    let rec = cleb_walk(
        &g,
        WeightAssignment::new(w),
        v,
        s.step_cap.unwrap_or(cleb::cleb::DEFAULT_STEP_CAP),
    )?;
    let body = match s.format {
        Format::Json => rec.to_json_lines(&g),
        Format::Csv => {
            let mut out = String::from("step,edge,color,pi,path_len\n");
            for (i, e) in rec.exposed.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    i + 1,
                    g.edge_label(*e),
                    rec.colors[i],
                    rec.pis[i],
                    rec.path_len[i]
                );
            }
            out
        }
    };
    emit(s, &body)?;
    Ok(true)
}

fn summary_line(sum: &TransienceSummary) -> String {
    serde_json::to_string(sum).expect("plain struct")
}

fn lcrw(s: &Settings, start: Option<u64>, radius: Option<u64>) -> Result<bool> {
    let cap = s.step_cap.unwrap_or(1_000_000);
    let g = match (&s.graph, &s.family) {
        (Some(_), _) => graph(s)?.0,
        (None, Some(f)) => {
            f.realize(radius.ok_or_else(|| anyhow!("--radius is required with --family"))?)?
        }
        (None, None) => bail!("--graph or --family is required"),
    };
    let v = match (start, &s.family, &s.graph) {
        (None, Some(f), None) => vertex(&g, Some(f.origin()))?,
        _ => vertex(&g, start)?,
    };
    let trace = lcrw_run(&g, v, cap, s.seed)?;
    let body = match s.format {
        Format::Csv => trace.to_csv(&g, None),
        Format::Json => format!("{}\n", summary_line(&TransienceSummary::of(&trace))),
    };
    emit(s, &body)?;
    Ok(true)
}

fn lcrw_grid(s: &Settings, d: u32, side: u64) -> Result<bool> {
    if d != 2 {
        bail!("lcrw-grid traces the plane only (d = 2)");
    }
    let (csv, summary) = grid_trace(side, s.step_cap.unwrap_or(10_000_000), s.seed)?;
    match &s.out {
        Some(p) => {
            std::fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?;
            println!("{}", summary_line(&summary));
        }
        None => print!("{csv}"),
    }
    Ok(true)
}

fn sandwich(s: &Settings, betas: &[f64], start: Option<u64>) -> Result<bool> {
    let (g, file) = graph(s)?;
    let w = weights(s, &g, &file)?;
    let v = vertex(&g, start)?;
    let trials = s.samples.unwrap_or(1000);
    let rep = wilson_sandwich_trial(
        &g,
        &w,
        v,
        betas,
        trials,
        s.seed,
        s.step_cap.unwrap_or(DEFAULT_LERW_STEP_CAP),
    )?;
    let ok = rep.e_cleb.is_subset(&rep.e_bar);
    let labels = |set: &std::collections::BTreeSet<cleb::EdgeId>| {
        set.iter().map(|e| g.edge_label(*e)).collect::<Vec<_>>()
    };
    let body = match s.format {
        Format::Csv => {
            let mut out = String::from("beta,frequency,stderr,trials,capped\n");
            for r in &rep.rows {
                let _ = writeln!(
                    out,
                    "{},{:.6},{:.6},{},{}",
                    r.beta, r.frequency, r.stderr, r.trials, r.capped
                );
            }
            out
        }
        Format::Json => format!(
            "{}\n",
            json!({"e_cleb": labels(&rep.e_cleb), "e_bar": labels(&rep.e_bar), "rows": rep.rows, "contained": ok})
        ),
    };
    emit(s, &body)?;
    Ok(ok)
}

fn invasion(s: &Settings, start: Option<u64>) -> Result<bool> {
    let (g, file) = graph(s)?;
    let w = weights(s, &g, &file)?;
    let v = vertex(&g, start)?;
    let verdict = invasion_equivalence_check(&g, &w, v)?;
    let body = match s.format {
        Format::Json => format!("{}\n", serde_json::to_string(&verdict)?),
        Format::Csv => {
            let mut out = String::from("k,invasion,walk\n");
            for k in 0..verdict.invasion.len().max(verdict.walk.len()) {
                let cell = |x: Option<&u64>| x.map(|x| x.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    k + 1,
                    cell(verdict.invasion.get(k)),
                    cell(verdict.walk.get(k))
                );
            }
            out
        }
    };
    emit(s, &body)?;
    Ok(verdict.equal)
}

fn dist_compare(s: &Settings, models: &[String], target: Option<Vec<u64>>) -> Result<bool> {
    let (g, _) = graph(s)?;
    let samples = s.samples.unwrap_or(100_000);
    let target = target.map(|mut t| {
        t.sort();
        t
    });
    let mut out = match s.format {
        Format::Csv => String::from("model,arborescence,count,freq,stderr\n"),
        Format::Json => String::new(),
    };
    for name in models {
        let m = WeightModel::parse(name)?;
        let rep = distribution_report(&g, &m, samples, s.seed)?;
        for r in &rep.rows {
            if target.as_ref().is_some_and(|t| *t != r.signature) {
                continue;
            }
            let sig: Vec<String> = r.signature.iter().map(u64::to_string).collect();
            match s.format {
                Format::Csv => {
                    let _ = writeln!(
                        out,
                        "{name},{},{},{:.6},{:.6}",
                        sig.join(" "),
                        r.count,
                        r.freq,
                        r.stderr
                    );
                }
                Format::Json => {
                    let line = json!({"model": name, "arborescence": r.signature, "count": r.count, "freq": r.freq, "stderr": r.stderr});
                    let _ = writeln!(out, "{line}");
                }
            }
        }
    }
    emit(s, &out)?;
    Ok(true)
}

fn wired_limit(s: &Settings, probes: Option<Vec<u64>>, seeds: Option<u64>) -> Result<bool> {
    let fam = family(s)?;
    let radii = s
        .radii
        .clone()
        .ok_or_else(|| anyhow!("--radii is required"))?;
    let probes = probes
        .or_else(|| s.probes.clone())
        .unwrap_or_else(|| vec![fam.origin()]);
    let replicas = seeds.or(s.seeds).unwrap_or(100);
    let rep = wired_msa_sequence(fam, &model(s)?, &radii, &probes, s.seed, replicas)?;
    let body = match s.format {
        Format::Csv => rep.to_csv(),
        Format::Json => format!(
            "{}\n",
            json!({"radii": rep.radii, "agreement": rep.agreement(), "histories": rep.histories})
        ),
    };
    emit(s, &body)?;
    Ok(true)
}

fn parse_pair(p: &str) -> Result<(u64, u64)> {
    let (a, b) = p
        .split_once('-')
        .ok_or_else(|| anyhow!("pair '{p}' is not of the form a-b"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn connectivity(s: &Settings, pairs: &[String], seeds: Option<u64>) -> Result<bool> {
    let fam = family(s)?;
    let radii = s
        .radii
        .clone()
        .ok_or_else(|| anyhow!("--radii is required"))?;
    let pairs = pairs
        .iter()
        .map(|p| parse_pair(p))
        .collect::<Result<Vec<_>>>()?;
    if pairs.is_empty() {
        bail!("--pairs is required");
    }
    let replicas = seeds.or(s.seeds).unwrap_or(50);
    let v = connectivity_monotonicity_check(fam, &model(s)?, &radii, &pairs, s.seed, replicas)?;
    let body = match s.format {
        Format::Json => format!("{}\n", serde_json::to_string(&v)?),
        Format::Csv => {
            let mut out = format!(
                "comparisons,connected_observations,violations\n{},{},{}\n",
                v.comparisons,
                v.connected,
                v.violations.len()
            );
            if !v.violations.is_empty() {
                out.push_str("seed,u,v,from_radius,to_radius\n");
                for x in &v.violations {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        x.seed, x.pair.0, x.pair.1, x.from_radius, x.to_radius
                    );
                }
            }
            out
        }
    };
    emit(s, &body)?;
    Ok(v.passed())
}

fn verify(s: &Settings, suite: &str) -> Result<bool> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else {
        vec![suite]
    };
    let mut out = String::new();
    let mut passed = true;
    for name in names {
        let rep = run_suite(name, s.seed)?;
        passed &= rep.passed;
        match s.format {
            Format::Csv => out.push_str(&rep.body()),
            Format::Json => {
                let line = json!({"suite": rep.suite, "seed": rep.seed, "lines": rep.lines, "passed": rep.passed});
                let _ = writeln!(out, "{line}");
            }
        }
    }
    emit(s, &out)?;
    Ok(passed)
}
