use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn cleb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cleb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn msa_prints_the_minimal_arborescence() {
    let g = fixture("nested_contraction.json");
    for algorithm in ["original", "sequential", "walk", "brute"] {
        let o = cleb(&[
            "msa",
            "--graph",
            g.to_str().unwrap(),
            "--algorithm",
            algorithm,
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(
            stdout(&o),
            "edge,tail,head,weight\n0,0,1,1\n2,1,2,4\n7,2,3,6\n8,3,4,1\n"
        );
    }
}

#[test]
fn fixed_weight_file_overrides_inline_weights() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    // make the direct exit from 3 expensive and 0 -> 4 cheap
    std::fs::write(
        &w,
        r#"{"0":1,"1":2,"2":4,"3":3,"4":9,"5":"1/2","6":12,"7":6,"8":100,"9":5}"#,
    )
    .unwrap();
    let g = fixture("nested_contraction.json");
    let spec = format!("fixed:{}", w.display());
    let o = cleb(&[
        "msa",
        "--graph",
        g.to_str().unwrap(),
        "--weights",
        &spec,
        "--format",
        "json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let edges: Vec<u64> = v["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["edge"].as_u64().unwrap())
        .collect();
    assert!(edges.contains(&5) && !edges.contains(&8), "{edges:?}");
    assert_eq!(v["valid"], true);
}

#[test]
fn dist_compare_reports_both_models() {
    let g = fixture("distribution_witness.json");
    let o = cleb(&[
        "dist-compare",
        "--graph",
        g.to_str().unwrap(),
        "--samples",
        "20000",
        "--seed",
        "7",
        "--target",
        "3,2,1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("exp1,1 2 3,") && rows[1].starts_with("unif01,1 2 3,"));
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let a = cleb(&["verify", "recovery", "--seed", "11"]);
    let b = cleb(&["verify", "recovery", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).ends_with("verdict: PASS\n"));
}

#[test]
fn exit_code_two_on_bad_input() {
    assert_eq!(cleb(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(
        cleb(&["msa", "--graph", "/definitely/missing.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cleb(&["wired-limit", "--family", "tree:0", "--radii", "2,3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cleb(&["wired-limit", "--family", "tree:2", "--radii", "3,2"])
            .status
            .code(),
        Some(2)
    );
    // the strict-inclusion fixture is not symmetric
    let g = fixture("strict_inclusion.json");
    assert_eq!(
        cleb(&["invasion-check", "--graph", g.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_drives_wired_limit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("limit.csv");
    let text = serde_json::json!({
        "family": "regular_tree", "params": {"arity": 3}, "radii": [2, 3, 4],
        "model": "exp1", "probes": [0], "seeds": 6, "step_cap": 1000, "out": out,
    });
    std::fs::write(&cfg, text.to_string()).unwrap();
    let o = cleb(&["wired-limit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.starts_with("seed,probe,r2,r3,r4,"));
    let again = cleb(&[
        "wired-limit",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("b.csv").to_str().unwrap(),
    ]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("b.csv")).unwrap(),
        csv
    );
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"family": "path", "radiuses": [1]}"#).unwrap();
    assert_eq!(
        cleb(&["wired-limit", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn grid_trace_goes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let o = cleb(&[
        "lcrw-grid",
        "--side",
        "41",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("step,event,path_len,cycle_len,x,y\n"));
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(
        summary["steps"].as_u64().unwrap() as usize,
        csv.lines().count() - 1
    );
    assert_eq!(cleb(&["lcrw-grid", "--d", "3"]).status.code(), Some(2));
}

#[test]
fn connectivity_passes_on_the_path() {
    let o = cleb(&[
        "connectivity",
        "--family",
        "path",
        "--radii",
        "10,20,30",
        "--pairs",
        "1-2,3-6,0-8",
        "--seeds",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(",0"));
}

#[test]
fn sandwich_and_walk_commands_run() {
    let g = fixture("sandwich_triangle.json");
    let o = cleb(&[
        "wilson-sandwich",
        "--graph",
        g.to_str().unwrap(),
        "--betas",
        "5,20",
        "--samples",
        "100",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let w = cleb(&[
        "cleb-walk",
        "--graph",
        g.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(w.status.code(), Some(0));
    assert!(stdout(&w)
        .lines()
        .all(|l| serde_json::from_str::<serde_json::Value>(l).is_ok()));
}
