use std::path::PathBuf;
use std::process::{Command, Output};

use planar_vcsp::json;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn pvcsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvcsp")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    pvcsp(args).status.code().expect("exit code")
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    serde_json::from_slice(&pvcsp(args).stdout).expect("json output")
}

#[test]
fn boolean_exit_codes() {
    assert_eq!(code(&["classify-boolean", &data("gamma_imp.json")]), 0);
    assert_eq!(code(&["classify-boolean", &data("gamma_is.json")]), 3);
    assert_eq!(code(&["classify-boolean", &data("gamma_nae.json")]), 4);
    assert_eq!(code(&["classify-boolean", &data("gamma_cut.json")]), 4);
    assert_eq!(code(&["classify-boolean", &data("gamma_cut_gamma0.json")]), 3);
    let v = stdout_json(&["classify-boolean", &data("gamma_cut_gamma0.json"), "--max-set", "1"]);
    assert_eq!(v["verdict"], "BudgetExhausted");
    assert_eq!(code(&["classify-boolean", &data("gamma_cut_gamma0.json"), "--max-set", "1"]), 5);
}

#[test]
fn conservative_exit_codes() {
    assert_eq!(code(&["classify-conservative", &data("gamma_cut.json")]), 3);
    assert_eq!(code(&["classify-conservative", &data("gamma_imp.json")]), 0);
    assert_eq!(code(&["classify-conservative", &data("rho_neq.json")]), 0);
    assert_eq!(code(&["classify-conservative", &data("chi_delta.json")]), 0);
    // A truncated pair graph misses the edges that make χ/δ tractable.
    let v = stdout_json(&["classify-conservative", &data("chi_delta.json"), "--max-set", "1"]);
    assert_eq!(v["verdict"], "Unknown");
    assert_eq!(v["truncated"], true);
    assert_eq!(code(&["classify-conservative", &data("chi_delta.json"), "--max-set", "1"]), 6);
}

#[test]
fn instance_commands() {
    let sol = stdout_json(&["solve", &data("four_vars.json")]);
    assert!(sol["optimum"].is_string());
    assert_eq!(code(&["solve", &data("nae_one_vertex.json")]), 2);
    assert_eq!(code(&["validate", &data("four_vars.json")]), 0);
    let text = pvcsp(&["express", &data("star.json"), "--format", "text"]);
    assert!(text.status.success());
    let q = pvcsp(&["express", &data("two_loops.json")]);
    let rel: planar_vcsp::WeightedRelation = serde_json::from_slice(&q.stdout).unwrap();
    assert_eq!(rel, planar_vcsp::catalog::rho_eq());
    assert_eq!(code(&["express", &data("star.json"), "--max-vars", "2"]), 5);
}

#[test]
fn input_errors() {
    assert_eq!(code(&["validate", &data("bad_table.json")]), 1);
    assert_eq!(code(&["classify-boolean", &data("truncated.json")]), 1);
    assert_eq!(code(&["solve", &data("gamma_is.json")]), 1);
    assert_eq!(code(&["classify-boolean", &data("chi_delta.json")]), 1);
    assert_eq!(code(&["check-mm", &data("gamma_imp.json"), "min,nope"]), 1);
    assert_eq!(code(&["classify-boolean", "/nonexistent.json"]), 1);
    let out = pvcsp(&["validate", &data("truncated.json")]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn multimorphism_checks() {
    let by_name = stdout_json(&["check-mm", &data("gamma_imp.json"), "min,max"]);
    let by_file = stdout_json(&["check-mm", &data("gamma_imp.json"), &data("min_max.json")]);
    assert_eq!(by_name, by_file);
    assert_eq!(by_name["verdict"], "holds");
    assert_eq!(stdout_json(&["check-mm", &data("gamma_nae.json"), "min,max"])["verdict"], "fails");
}

#[test]
fn synthesized_queries_parse_back() {
    let v = stdout_json(&["synthesize", &data("gamma_is.json")]);
    let gadgets = v["gadgets"].as_array().expect("list of gadgets");
    assert_eq!(gadgets.len(), 4);
    for g in gadgets {
        let q = json::parse_query(&g["realization"].to_string()).unwrap();
        assert!(planar_vcsp::plane::validate_instance(&q.instance).ok);
        assert_eq!(g["check"]["matches"], true);
    }
}

#[test]
fn pair_graph_dot() {
    let out = pvcsp(&["pair-graph", &data("gamma_cut.json"), "--dot"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph"), "{dot}");
    let same = pvcsp(&["pair-graph", &data("gamma_cut.json"), "--format", "dot"]);
    assert_eq!(String::from_utf8(same.stdout).unwrap(), dot);
}
