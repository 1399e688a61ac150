//! End-to-end runs of the `bincs` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bincs_core::io::{load_instance, read_model, ModelFile};
use bincs_core::qubo_ising::QuadraticModel;
use serde_json::Value;
use tempfile::TempDir;

fn bincs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bincs")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = bincs(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Compares two model exports line by line, numbers to 1e-15.
fn assert_same_model(actual: &str, expected: &str) {
    let a: Vec<&str> = actual.lines().filter(|l| !l.trim().is_empty()).collect();
    let e: Vec<&str> = expected.lines().filter(|l| !l.trim().is_empty()).collect();
    assert_eq!(a.len(), e.len(), "\n{actual}\nvs\n{expected}");
    for (la, le) in a.iter().zip(&e) {
        let (ta, te): (Vec<&str>, Vec<&str>) = (la.split_whitespace().collect(), le.split_whitespace().collect());
        assert_eq!(ta.len(), te.len(), "{la} vs {le}");
        for (x, y) in ta.iter().zip(&te) {
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(u), Ok(v)) => assert!((u - v).abs() <= 1e-15, "{la} vs {le}"),
                _ => assert_eq!(x, y),
            }
        }
    }
}

#[test]
fn build_identity_matches_hand_computed_ising() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("id.ising");
    ok(&["build", "--in", p(&data("identity.json")), "--form", "ising", "--out", p(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_same_model(&text, &std::fs::read_to_string(data("identity.ising")).unwrap());
    assert!(text.contains("# offset 1.1000000000000001e0"));
}

#[test]
fn gen_solve_agrees_with_uniqueness_verdict() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("g.json");
    let diag = dir.path().join("d.json");
    let sol = dir.path().join("s.json");
    ok(&["gen", "--kind", "cs", "--m", "4", "--n", "8", "--s", "2", "--seed", "5", "--out", p(&inst)]);
    ok(&["diagnose", "--in", p(&inst), "--uniqueness", "--out", p(&diag)]);
    ok(&["solve", "--in", p(&inst), "--backend", "exhaustive", "--seed", "0", "--out", p(&sol)]);
    let doc = load_instance(&inst).unwrap();
    let truth: Vec<i64> = doc.truth.unwrap().x.values().iter().map(|&v| v as i64).collect();
    let d = read_json(&diag);
    let s = read_json(&sol);
    let x: Vec<i64> = s["best_state"].as_array().unwrap().iter().map(|v| v.as_i64().unwrap()).collect();
    if d["uniqueness"]["unique"].as_bool().unwrap() {
        assert_eq!(x, truth);
        assert_eq!(d["uniqueness"]["truth_is_unique_minimizer"], Value::Bool(true));
        assert_eq!(s["metrics"]["exact_match"], Value::Bool(true));
    }
    let minimizers = d["uniqueness"]["minimizers"].as_array().unwrap();
    assert!(minimizers.iter().any(|m| m.as_array().unwrap().iter().map(|v| v.as_i64().unwrap()).eq(x.iter().copied())));
}

#[test]
fn exhaustive_size_guard_exits_3() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("big.json");
    ok(&["gen", "--m", "6", "--n", "30", "--s", "2", "--out", p(&inst)]);
    let out = bincs(&["solve", "--in", p(&inst), "--backend", "exhaustive", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size error"));
    // the heuristics handle it
    ok(&["solve", "--in", p(&inst), "--backend", "local", "--starts", "4"]);
}

#[test]
fn malformed_input_exits_2_naming_the_field() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("bad.json");
    std::fs::write(&inst, r#"{"kind":"cs","m":1,"n":1,"A":[[1.0]],"y":[1.0]}"#).unwrap();
    let out = bincs(&["solve", "--in", p(&inst)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));

    std::fs::write(&inst, r#"{"kind":"cs","m":2,"n":1,"A":[[1.0],[2.0]],"y":[1.0],"lambda":0.1}"#).unwrap();
    assert_eq!(bincs(&["build", "--in", p(&inst), "--form", "qubo"]).status.code(), Some(2));
    assert_eq!(bincs(&["solve", "--in", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(bincs(&["gen", "--m", "2"]).status.code(), Some(2));
    assert_eq!(bincs(&["gen", "--m", "2", "--n", "3", "--s", "4"]).status.code(), Some(2));
}

#[test]
fn outputs_round_trip_through_the_loaders() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("u.json");
    ok(&[
        "gen", "--kind", "cs-uncertain", "--m", "6", "--n", "5", "--s", "2", "--r", "2", "--gamma", "50", "--noise",
        "--seed", "8", "--out", p(&inst),
    ]);
    let doc = load_instance(&inst).unwrap();
    assert_eq!(doc.truth.as_ref().unwrap().d.as_ref().unwrap().len(), 2);
    let again = dir.path().join("u2.json");
    bincs_core::io::save_instance(&doc, &again).unwrap();
    assert_eq!(load_instance(&again).unwrap(), doc);

    for (form, extra) in [("qubo", vec![]), ("ising", vec!["--normalize", "--bits", "5"])] {
        let model = dir.path().join(format!("m.{form}"));
        let mut args = vec!["build", "--in", p(&inst), "--form", form, "--out", p(&model)];
        args.extend(extra);
        ok(&args);
        let parsed = read_model(&std::fs::read_to_string(&model).unwrap()).unwrap();
        let n = match &parsed {
            ModelFile::Qubo(q) => q.num_vars(),
            ModelFile::Ising(s) => s.num_vars(),
        };
        assert_eq!(n, 5);
        let sol = dir.path().join(format!("s.{form}.json"));
        ok(&["solve", "--in", p(&model), "--backend", "sa", "--sweeps", "200", "--reads", "4", "--out", p(&sol)]);
        assert_eq!(read_json(&sol)["backend"], "sa");
    }
}

#[test]
fn recover_reports_trace_and_errors() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("u.json");
    let out = dir.path().join("trace.json");
    ok(&["gen", "--kind", "cs-uncertain", "--m", "12", "--n", "10", "--s", "2", "--gamma", "1e8", "--seed", "3", "--out", p(&inst)]);
    ok(&["recover", "--in", p(&inst), "--backend", "exhaustive", "--eps", "1e-6", "--max-iters", "20", "--seed", "0", "--out", p(&out)]);
    let t = read_json(&out);
    assert!(!t["iterations"].as_array().unwrap().is_empty());
    let objs: Vec<f64> = t["iterations"].as_array().unwrap().iter().map(|it| it["objective"].as_f64().unwrap()).collect();
    assert!(objs.windows(2).all(|w| w[1] <= w[0]));
    assert!(["epsilon", "max_iters", "stagnation"].contains(&t["terminated_by"].as_str().unwrap()));
    assert!(t["d_error"].as_f64().is_some());

    let plain = dir.path().join("c.json");
    ok(&["gen", "--m", "3", "--n", "4", "--s", "1", "--out", p(&plain)]);
    assert_eq!(bincs(&["recover", "--in", p(&plain)]).status.code(), Some(2));
}

#[test]
fn diagnose_reports_requested_sections() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("g.json");
    let rep = dir.path().join("r.json");
    ok(&["gen", "--m", "6", "--n", "8", "--s", "1", "--dist", "bernoulli", "--seed", "2", "--out", p(&inst)]);
    ok(&["diagnose", "--in", p(&inst), "--coherence", "--rip", "2", "--out", p(&rep)]);
    let r = read_json(&rep);
    let mu = r["coherence"]["mu"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&mu));
    assert!(r["rip"]["delta"].as_f64().unwrap() >= 0.0);
    assert!(r.get("uniqueness").is_none());
    assert_eq!(r["advisory"]["rip_delta_2s_threshold"], 0.4931);
    let capped = bincs(&["diagnose", "--in", p(&inst), "--rip", "4", "--rip-cap", "10"]);
    assert_eq!(capped.status.code(), Some(3));
}

#[test]
fn embed_single_cell_and_explicit_map() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.ising");
    std::fs::write(&model, "# type ising\n# n 1\n# offset 0\nh 0 1\n").unwrap();
    let out = dir.path().join("p.ising");
    ok(&["embed", "--in", p(&model), "--cells", "1", "1", "--t", "1", "--chain-strength", "2", "--out", p(&out)]);
    let expected = "# type ising\n# n 2\n# offset 2\nh 0 0.5\nh 1 0.5\nJ 0 1 -2\n";
    assert_same_model(&std::fs::read_to_string(&out).unwrap(), expected);

    let emb = dir.path().join("e.json");
    std::fs::write(&emb, r#"{"chains": [[0, 4]]}"#).unwrap();
    ok(&["embed", "--in", p(&model), "--cells", "2", "1", "--t", "4", "--embedding", p(&emb), "--out", p(&out)]);
    let ModelFile::Ising(phys) = read_model(&std::fs::read_to_string(&out).unwrap()).unwrap() else {
        panic!("expected an Ising export");
    };
    assert_eq!(phys.n(), 16);
    assert_eq!(bincs(&["embed", "--in", p(&model), "--cells", "2", "1"]).status.code(), Some(2));

    let five = dir.path().join("k5.ising");
    std::fs::write(&five, "# type ising\n# n 5\n# offset 0\n").unwrap();
    assert_eq!(bincs(&["embed", "--in", p(&five), "--cells", "1", "1", "--t", "4"]).status.code(), Some(3));
}

#[test]
fn bench_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        ok(&[
            "bench", "--n", "8", "--m-list", "3,6", "--s-list", "0,2", "--trials", "6", "--backend", "exhaustive",
            "--seed", "17", "--out", p(path),
        ]);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(bincs_cli::CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for row in rows.iter().filter(|r| r[2] == "0") {
        assert_eq!(row[5], "1");
    }
}
