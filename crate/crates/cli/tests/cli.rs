//! End-to-end runs of the `hitset` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn hitset(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitset")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json_out(out: &Output) -> Value {
    assert!(
        out.status.success() || code(out) == 1,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    std::fs::write(dir.join(name), v.to_string()).unwrap();
    name.to_string()
}

/// `x0·x1 − x1·x1` as a circuit file.
fn product_circuit() -> Value {
    json!({
        "n_vars": 2,
        "gates": [
            {"id": 0, "kind": "input", "args": [0]},
            {"id": 1, "kind": "input", "args": [1]},
            {"id": 2, "kind": "mul", "args": [0, 1]},
            {"id": 3, "kind": "mul", "args": [1, 1]},
            {"id": 4, "kind": "const", "args": ["-1"]},
            {"id": 5, "kind": "mul", "args": [4, 3]},
            {"id": 6, "kind": "add", "args": [2, 5]}
        ],
        "outputs": [6],
        "homogeneous": true
    })
}

#[test]
fn params_reports_exact_eta() {
    let dir = scratch("params");
    let v = json_out(&hitset(&dir, &["params", "--n", "1", "--s", "1", "--r", "1", "--ccw", "1"]));
    assert_eq!(v["eta"], "1/40");
    assert_eq!(v["c_cw"], "1");
    let v = json_out(&hitset(&dir, &["params", "--n", "1", "--s", "1", "--r", "1", "--override", "m=7"]));
    assert_eq!(v["m"], "7");
    assert_eq!(v["provenance"], json!(["m"]));
}

#[test]
fn demo_tensor_shows_epsilon_at_bad_point() {
    let dir = scratch("tensor");
    let out = hitset(&dir, &["robust", "demo-tensor", "--eps", "1/10", "--csv", "t.csv"]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["rows"][0]["value_at_bad_point"], "1/10");
    assert_eq!(v["t_at_bad_point"], "0");
    assert_eq!(v["all_hit"], true);
    let csv = std::fs::read_to_string(dir.join("t.csv")).unwrap();
    assert!(csv.starts_with("# manifest_digest="));
    assert!(csv.lines().nth(2).unwrap().starts_with("1/10,1/10,"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = scratch("usage");
    assert_eq!(code(&hitset(&dir, &["frobnicate"])), 2);
    assert_eq!(code(&hitset(&dir, &[])), 2);
    assert_eq!(code(&hitset(&dir, &["params", "--n", "1"])), 2);
    assert_eq!(code(&hitset(&dir, &["params", "--n", "1", "--s", "1", "--r", "1", "--ccw", "x/y"])), 2);
    assert_eq!(code(&hitset(&dir, &["params", "--n", "1", "--s", "1", "--r", "1", "--override", "bogus=1"])), 2);
    let rand = ["search", "run", "--n", "1", "--s", "1", "--r", "1", "--mode", "rand"];
    assert_eq!(code(&hitset(&dir, &rand)), 2);
    assert_eq!(code(&hitset(&dir, &["--help"])), 0);
}

#[test]
fn domain_and_backend_errors() {
    let dir = scratch("errors");
    // Non-unit-fraction grid spacing.
    assert_eq!(code(&hitset(&dir, &["grid", "enum", "--n", "1", "--delta", "2/3"])), 1);
    assert_eq!(code(&hitset(&dir, &["circuit", "check", "--circuit", "missing.json"])), 1);
    std::fs::write(dir.join("q.smt2"), "(check-sat)\n").unwrap();
    let out = hitset(&dir, &["etr", "solve", "--input", "q.smt2", "--solver", "/nonexistent/solver"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn circuit_pipeline() {
    let dir = scratch("circuit");
    let c = write_json(&dir, "c.json", &product_circuit());
    let v = json_out(&hitset(&dir, &["circuit", "eval", "--circuit", &c, "--point", "2,1/2+1 i"]));
    // 2·(1/2 + i) − (1/2 + i)² = 7/4 + i
    assert_eq!(v["values"], json!(["7/4+1 i"]));
    let v = json_out(&hitset(&dir, &["circuit", "check", "--circuit", &c]));
    assert_eq!(v["homogeneity"], json!({"homogeneous": true, "degrees": [2]}));
    assert_eq!(v["size"], 8);

    let out = hitset(&dir, &["--output", "art", "circuit", "expand", "--circuit", &c]);
    assert_eq!(code(&out), 0);
    let poly = json_out(&out);
    assert_eq!(poly["n"], 2);
    assert_eq!(poly["terms"].as_array().unwrap().len(), 2);
    let art: Value = serde_json::from_slice(&std::fs::read(dir.join("art/circuit-expand.json")).unwrap()).unwrap();
    assert_eq!(art["result"], poly);
    assert_eq!(art["manifest_digest"].as_str().unwrap().len(), 64);
    assert_eq!(art["manifest"]["tool_version"], env!("CARGO_PKG_VERSION"));

    // The enveloped artifact is accepted wherever a polynomial is expected.
    let v = json_out(&hitset(&dir, &["norm", "--poly", "art/circuit-expand.json", "--delta", "1/4", "--markov-point", "1/2,-1/2"]));
    // E[x0²x1²] + E[x1⁴] = 1/9 + 1/5 under the uniform probability measure.
    assert_eq!(v["l2_sq"], "14/45");
    assert_eq!(v["markov"][0]["holds"], true);
    let out = hitset(&dir, &["anticonc", "real", "--poly", "art/circuit-expand.json", "--delta", "1/8", "--exhaustive"]);
    let v = json_out(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    let passed = v["rows"].as_array().unwrap().iter().all(|r| r["status"] != "fail");
    assert_eq!(code(&out), if passed { 0 } else { 1 });

    let embed = hitset(&dir, &["universal", "embed", "--n", "2", "--s", "4", "--r", "2", "--circuit", &c, "--scale", "3"]);
    let v = json_out(&embed);
    assert_eq!(v["reproduces_circuit"], true);
}

#[test]
fn grid_sampling_is_reproducible() {
    let dir = scratch("grid");
    let args = ["grid", "sample", "--n", "2", "--delta", "1/4", "--variant", "complex", "--count", "5", "--seed", "9"];
    let a = json_out(&hitset(&dir, &args));
    let b = json_out(&hitset(&dir, &args));
    assert_eq!(a, b);
    assert_eq!(a["points"].as_array().unwrap().len(), 5);
    let e = json_out(&hitset(&dir, &["grid", "enum", "--n", "1", "--delta", "1/2", "--variant", "realified", "--r", "1"]));
    assert_eq!(e["size"], "32");
    assert_eq!(e["points"][0], json!(["-1"]));
    assert_eq!(code(&hitset(&dir, &["grid", "enum", "--n", "1", "--delta", "1/2", "--variant", "realified"])), 2);
}

#[test]
fn robust_verify_and_hardpoly() {
    let dir = scratch("robust");
    let h = write_json(
        &dir,
        "h.json",
        &json!({"domain": "real", "epsilon_sq": "1/100", "points": [["1", "1"]], "provenance": "loaded"}),
    );
    let out = hitset(&dir, &["--output", "art", "hardpoly", "--hitting-set", &h]);
    assert_eq!(code(&out), 0);
    let f = json_out(&out);
    assert_eq!(f["degree"], 1);
    // The extracted polynomial vanishes on the set, so the set has no witness for it.
    let out = hitset(&dir, &["robust", "verify", "--hitting-set", &h, "--poly", "art/hardpoly.json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_out(&out)["result"], "no_witness");
    let other = write_json(
        &dir,
        "g.json",
        &json!({"domain": "real", "epsilon_sq": "1/100", "points": [["1", "0"]], "provenance": "loaded"}),
    );
    let out = hitset(&dir, &["robust", "verify", "--hitting-set", &other, "--poly", "art/hardpoly.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_out(&out)["index"], 0);

    let real = json_out(&hitset(&dir, &["robust", "realify", "--hitting-set", &other, "--r", "2"]));
    assert_eq!(real["provenance"], "realified");
    let s = json_out(&hitset(&dir, &["robust", "sample", "--n", "1", "--s", "1", "--r", "1", "--override", "m=3", "--seed", "4"]));
    assert_eq!(s["points"].as_array().unwrap().len(), 3);
    assert_eq!(s["domain"], "complex");
}

#[test]
fn config_file_supplies_flags_and_explicit_flags_win() {
    let dir = scratch("config");
    std::fs::write(dir.join("run.toml"), "output = \"art\"\n[params]\nn = 3\ns = 1\nr = 1\nccw = \"1\"\n").unwrap();
    let out = hitset(&dir, &["--config", "run.toml", "params", "--n", "1"]);
    let v = json_out(&out);
    assert_eq!(v["n"], 1);
    assert_eq!(v["eta"], "1/40");
    let art: Value = serde_json::from_slice(&std::fs::read(dir.join("art/params.json")).unwrap()).unwrap();
    assert_eq!(art["manifest"]["config_digest"].as_str().unwrap().len(), 64);
    std::fs::write(dir.join("bad.toml"), "[params]\nn = 1.5\n").unwrap();
    assert_eq!(code(&hitset(&dir, &["--config", "bad.toml", "params"])), 2);
}

#[test]
fn encodings_dump_smtlib() {
    let dir = scratch("etr");
    let out = hitset(&dir, &["etr", "encode-phi", "--n", "1", "--s", "1", "--r", "1", "--point", "-1", "--eps", "1/3"]);
    let v = json_out(&out);
    assert!(v["smtlib"].as_str().unwrap().contains("(check-sat)"));
    let out = hitset(
        &dir,
        &["etr", "encode-search", "--n", "1", "--s", "1", "--r", "1", "--candidate", "0", "--eps", "1/100", "--dump", "q.smt2"],
    );
    let v = json_out(&out);
    assert!(v.get("smtlib").is_none());
    let text = std::fs::read_to_string(dir.join("q.smt2")).unwrap();
    assert!(text.starts_with("; manifest_digest="));
    assert!(text.contains("QF_NRA"));
}

#[test]
fn search_run_and_certificate_verification() {
    let dir = scratch("search");
    let args = [
        "--output", "art", "search", "run", "--n", "1", "--s", "1", "--r", "1", "--delta", "1/2", "--m", "2", "--eps",
        "1/100", "--timeout", "20", "--csv", "q.csv",
    ];
    let out = hitset(&dir, &args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cert = json_out(&out);
    assert_eq!(cert["outcome"], "certificate");
    assert_eq!(cert["accepted_at"], 0);
    assert_eq!(cert["hitting_set"]["points"], json!([["-1"], ["-1"]]));
    let art: Value = serde_json::from_slice(&std::fs::read(dir.join("art/search-run.json")).unwrap()).unwrap();
    assert!(!art["manifest"]["solver_identity"].as_str().unwrap().is_empty());
    let csv = std::fs::read_to_string(dir.join("q.csv")).unwrap();
    assert!(csv.ends_with(",unsat\n"));

    let jobs = hitset(&dir, &[&["--jobs", "2"][..], &args[2..]].concat());
    assert_eq!(json_out(&jobs), cert);

    let out = hitset(&dir, &["search", "verify-cert", "--certificate", "art/search-run.json", "--trials", "20", "--recheck"]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["well_formed"], true);
    assert_eq!(v["recheck"], true);
    assert_eq!(v["check"]["pass_fraction"], "1");

    let tiny = [
        "search", "run", "--n", "1", "--s", "1", "--r", "1", "--delta", "1/2", "--m", "2", "--eps", "1/100", "--cost-cap",
        "10",
    ];
    assert_eq!(code(&hitset(&dir, &tiny)), 1);
}
