//! The command-line front end, driven in-process.

use std::ffi::OsString;
use std::path::PathBuf;

use entrolab::cli::main_with;
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<OsString> = std::iter::once("entrolab").chain(args.iter().copied()).map(OsString::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    serde_json::from_str(&out).unwrap()
}

fn without_timings(mut v: Value) -> String {
    v.as_object_mut().unwrap().remove("timings_ms");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn example1_base_is_feasible() {
    let v = run_json(&["example1", "--capacities", "1,1,1,1"]);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["command"][0], "example1");
    assert_eq!(v["result"]["explicit_witness_satisfies"], true);
    assert_eq!(v["result"]["base"]["verdict"], "Feasible");
}

#[test]
fn example1_gk_is_infeasible_with_certificate() {
    let v = run_json(&["example1", "--capacities", "1,1,1,1", "--improved", "gk"]);
    let improved = &v["result"]["improved"];
    assert_eq!(improved["verdict"], "Infeasible");
    assert_eq!(improved["verified"], true);
    assert!(improved["certificate"]["support"].as_array().is_some_and(|c| !c.is_empty()));
    assert!(improved["system_digest"].is_string());
}

#[test]
fn text_mode_uses_information_notation() {
    let (code, out, _) = run(&["--format", "text", "example1", "--improved", "gk"]);
    assert_eq!(code, 0);
    assert!(out.contains("I(") && out.contains("h("), "{out}");
    assert!(out.contains("certificate verified: true"));
}

#[test]
fn bound_subcommands_on_bundled_problem() {
    let p = data("example1.json");
    assert_eq!(run_json(&["bound", "check", "--problem", &p, "--capacities", "1,1,1,1"])["result"]["verdict"], "Feasible");
    let v = run_json(&["bound", "improve", "--problem", &p, "--capacities", "1,1,1,1", "--aux", &data("example1_aux_selected.json")]);
    assert_eq!(v["result"]["verdict"], "Infeasible");
    let v = run_json(&["bound", "fd", "--problem", &p, "--capacities", "2/3,2/3,2/3,2/3"]);
    assert_eq!(v["status"], "ok");
    // Cut-set needs every sink to demand every source.
    let (code, _, err) = run(&["bound", "cutset", "--problem", &p, "--capacities", "1,1,1,1"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn reports_are_deterministic() {
    let args = ["aux", "delta", "--distribution", &data("perturbed_pair.json"), "--seed", "3"];
    let a = without_timings(run_json(&args));
    let b = without_timings(run_json(&args));
    assert_eq!(a, b);
    let args = ["example1", "--improved", "gk"];
    assert_eq!(without_timings(run_json(&args)), without_timings(run_json(&args)));
}

#[test]
fn delta_requires_a_seed() {
    let (code, _, err) = run(&["aux", "delta", "--distribution", &data("perturbed_pair.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("--seed"), "{err}");
}

#[test]
fn unknown_flag_is_an_input_error() {
    let (code, _, err) = run(&["bound", "check", "--bogus"]);
    assert_eq!(code, 1);
    assert!(err.to_lowercase().contains("usage"), "{err}");
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, err) = run(&["verify-properties", "--distribution", "/nonexistent/d.json"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn recover_self_test() {
    let v = run_json(&["recover", "--self-test", "--n", "3", "--trials", "100", "--seed", "7"]);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["passed"], 100);
    assert_eq!(v["result"]["failures"], serde_json::json!([]));
}

#[test]
fn recover_from_entropy_table() {
    let v = run_json(&["recover", "--entropies", &data("quarter_entropies.json"), "--n", "3"]);
    let p: Vec<f64> = serde_json::from_value(v["result"]["probabilities"].clone()).unwrap();
    let mut p = p;
    p.sort_by(|a, b| b.total_cmp(a));
    for (a, b) in p.iter().zip([0.5, 0.25, 0.25]) {
        assert!((a - b).abs() < 1e-9, "{p:?}");
    }
}

#[test]
fn recover_round_trip_from_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    std::fs::write(&path, format!("{{\"distribution\": {}}}", std::fs::read_to_string(data("quarter.json")).unwrap())).unwrap();
    let v = run_json(&["recover", "--entropies", path.to_str().unwrap(), "--n", "3", "--seed", "1"]);
    assert_eq!(v["status"], "ok");
}

#[test]
fn verify_properties_and_aux_files() {
    let v = run_json(&["verify-properties", "--distribution", &data("quarter.json")]);
    assert_eq!(v["status"], "ok");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("aux.json");
    run_json(&["aux", "gk", "--problem", &data("example1.json"), "--out", out.to_str().unwrap()]);
    let v = run_json(&["bound", "improve", "--problem", &data("example1.json"), "--capacities", "1,1,1,1", "--aux", out.to_str().unwrap()]);
    assert_eq!(v["result"]["verdict"], "Infeasible");
    let lin = dir.path().join("lin.json");
    run_json(&["aux", "linear", "--sources", &data("example1_linear.json"), "--out", lin.to_str().unwrap()]);
    assert!(lin.exists());
}

#[test]
fn dump_lp_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sys.lp");
    let v = run_json(&["dump-lp", "--problem", &data("example1.json"), "--capacities", "1,1,1,1", "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out).unwrap();
    let sys = entrolab::lp::parse_lp(&text).unwrap();
    assert_eq!(v["result"]["rows"].as_u64().unwrap() as usize, sys.len());
    assert_eq!(v["result"]["system_digest"], entrolab::report::system_digest(&sys));
}
