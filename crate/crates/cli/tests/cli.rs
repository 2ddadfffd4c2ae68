use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const TABLE_CFG: &str = "c1 = 1.73\nc2 = 0.93\nc3_branch = plus\nct1 = 0.07\nct2 = 0.93\nct3_branch = plus\n";

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("g2chain-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2chain")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn verify_r_suite_passes() {
    let out = run(&["verify", "--suite", "r"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ok"], true);
    assert_eq!(v["suites"][0]["suite"], "r");
}

#[test]
fn impossible_tolerance_exits_two() {
    let out = run(&["verify", "--suite", "boundary", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!json(&out)["suites"][0]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = scratch("errors");
    let bad = write(&dir, "bad.cfg", &format!("{TABLE_CFG}c4 = 1\n"));
    assert_eq!(run(&["spectrum", "--boundary", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--tol", "0"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let cfg = write(&dir, "t.cfg", TABLE_CFG);
    assert_eq!(run(&["spectrum", "--boundary", cfg.to_str().unwrap(), "--n-sites", "2", "--theta", "0"]).status.code(), Some(1));
}

#[test]
fn one_site_spectrum_and_echo() {
    let dir = scratch("n1");
    let cfg = write(&dir, "t.cfg", TABLE_CFG);
    let out = run(&["spectrum", "--n-sites", "1", "--u0", "0.1414213562373095,0", "--boundary", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["degeneracies"], serde_json::json!([1, 2, 2, 2]));
    let levels: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect();
    for (got, want) in levels.iter().zip([-1906.599, -2427.0809, -4691.3338, -5951.5545]) {
        assert!((got - want).abs() <= 1e-3 * want.abs());
    }
    let echo = &v["params_echo"];
    assert!((echo["x"][0].as_f64().unwrap() + 2.7644).abs() < 1e-4);
    assert!((echo["c3"][0].as_f64().unwrap() - 0.99137).abs() < 1e-5);
    assert!(echo["A"].is_array() && echo["ct3"].is_array());
}

#[test]
fn two_site_spectrum_has_thirty_levels() {
    let dir = scratch("n2");
    let cfg = write(&dir, "t.cfg", TABLE_CFG);
    let v = json(&run(&["spectrum", "--n-sites", "2", "--u0", "0.1414213562,0", "--boundary", cfg.to_str().unwrap()]));
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 30);
    let states: u64 = v["degeneracies"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap()).sum();
    assert_eq!(states, 49);
}

#[test]
fn spectrum_file_round_trips_through_matching() {
    let dir = scratch("roundtrip");
    let cfg = write(&dir, "t.cfg", TABLE_CFG);
    let cfg = cfg.to_str().unwrap();
    let spec = dir.join("spec.json");
    assert_eq!(run(&["spectrum", "--boundary", cfg, "--out", spec.to_str().unwrap()]).status.code(), Some(0));
    let direct = run(&["bae-solve", "--boundary", cfg, "--l1", "1", "--seeds", "random:30"]);
    let from_file = run(&["bae-solve", "--boundary", cfg, "--l1", "1", "--seeds", "random:30", "--spectrum", spec.to_str().unwrap()]);
    assert_eq!(direct.status.code(), Some(0));
    assert_eq!(direct.stdout, from_file.stdout);
    // a spectrum taken at another point is refused
    let other = dir.join("other.json");
    run(&["spectrum", "--boundary", cfg, "--u0", "0.3,0", "--out", other.to_str().unwrap()]);
    assert_eq!(run(&["bae-solve", "--boundary", cfg, "--l1", "1", "--spectrum", other.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn multistart_is_deterministic_given_a_seed() {
    let args = ["bae-solve", "--periodic", "--theta", "0.27,-0.41", "--l1", "1", "--l2", "0", "--seeds", "random:40", "--rng-seed", "5", "--u0", "0.23,-0.17"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_g2chain")).args(args).env("G2CHAIN_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v["solutions"].as_array().unwrap().iter().all(|s| s["matched_ed_level"].is_object()));
}

#[test]
fn seeded_solve_recovers_printed_roots() {
    let dir = scratch("seeds");
    let cfg = write(&dir, "t.cfg", TABLE_CFG);
    let seeds = write(&dir, "seeds.json", r#"[{"mu1": [[-0.9357, 0]], "mu2": [[-0.7088, 0]]}]"#);
    let out = run(&["bae-solve", "--boundary", cfg.to_str().unwrap(), "--l1", "1", "--seeds", seeds.to_str().unwrap(), "--relations"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let sol = &v["solutions"][0];
    assert!(sol["residual"].as_f64().unwrap() < 1e-9);
    assert!((sol["lambda_u0"][0].as_f64().unwrap() + 4691.3338).abs() < 5e-3);
    assert_eq!(sol["relations"]["ok"], true);
}

#[test]
fn tq_eval_checks_roots() {
    let dir = scratch("tq");
    let cfg = write(&dir, "t.cfg", TABLE_CFG);
    let cfg = cfg.to_str().unwrap();
    let good = write(&dir, "good.json", r#"{"mu1": [[-0.267170490371, 0]], "mu2": [[0, -1.64756781842]]}"#);
    let out = run(&["tq-eval", "--boundary", cfg, "--roots", good.to_str().unwrap(), "--u", "0.1414213562373095,0;0.3,-0.2", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["values"].as_array().unwrap().len(), 2);
    assert!((v["values"][0]["fund"][0].as_f64().unwrap() + 2427.0809).abs() < 1e-3);
    let bad = write(&dir, "bad.json", r#"{"mu1": [[-0.3, 0]], "mu2": [[0, -1.6]]}"#);
    assert_eq!(run(&["tq-eval", "--boundary", cfg, "--roots", bad.to_str().unwrap(), "--check"]).status.code(), Some(2));
    assert_eq!(run(&["tq-eval", "--boundary", cfg, "--roots", bad.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn table_one_grid_passes_and_records_branch() {
    let out = run(&["reproduce-tables", "--table", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["chosen"]["minus"], "plus");
    assert_eq!(v["chosen"]["plus"], "plus");
    assert_eq!(v["branch_scan"].as_array().unwrap().len(), 4);
    assert_eq!(v["tables"][0]["report"]["ed_level_count"], 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
}

#[test]
fn written_json_parses_back_unchanged() {
    let dir = scratch("json");
    let p = dir.join("t1.json");
    run(&["reproduce-tables", "--table", "1", "--out", p.to_str().unwrap()]);
    let text = std::fs::read_to_string(&p).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}
