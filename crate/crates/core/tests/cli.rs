use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use smoothcx::cli::run;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn cmd(args: &[&str]) -> smoothcx::cli::Outcome {
    run(std::iter::once("smoothcx").chain(args.iter().copied()))
}

fn json(out: &smoothcx::cli::Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn nonsolvable_cycle_exit_one() {
    let out = cmd(&["smoothable", &data("nonsolvable_cycle.json")]);
    assert_eq!(out.code, 1);
    let v = json(&out);
    assert_eq!(v["verdict"], "NOT_SOLVABLE");
    assert_eq!(v["integral"], "1");
    assert!(!v["cycle"].as_array().unwrap().is_empty());
}

#[test]
fn systems_level_three_on_lattice() {
    let out = cmd(&["systems", "--level", "3", &data("lattice_2.json")]);
    assert_eq!(out.code, 0);
    assert_eq!(json(&out)["count"], 1);
    let out = cmd(&["systems", "--level", "2", &data("lattice_2.json")]);
    assert_eq!(json(&out)["count"], 2);
    assert_eq!(cmd(&["systems", "--level", "7", &data("lattice_2.json")]).code, 2);
}

#[test]
fn biftree_dot_shape() {
    let out = cmd(&["biftree", &data("ebif.json")]);
    assert_eq!(out.code, 0);
    let nodes = out.stdout.lines().filter(|l| l.trim_start().starts_with('n') && !l.contains("->")).count();
    assert_eq!(nodes, 6);
    assert_eq!(out.stdout.matches("->").count(), 5);
    assert_eq!(out.stdout.matches("leaf=true").count(), 4);
}

#[test]
fn witness_report_rechecks() {
    let out = cmd(&["smoothable", "--witness", &data("ebif.json")]);
    assert_eq!(out.code, 0);
    assert!(json(&out)["morphism"]["degree"].is_u64());
    let dir = std::env::temp_dir().join(format!("smoothcx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("report.json");
    std::fs::write(&report, &out.stdout).unwrap();
    let check = cmd(&["check-witness", &data("ebif.json"), report.to_str().unwrap()]);
    assert_eq!(check.code, 0, "{}", check.stderr);
    // a report for another instance does not verify
    let other = cmd(&["check-witness", &data("lattice_3.json"), report.to_str().unwrap()]);
    assert_ne!(other.code, 0);

    let dot = dir.join("w.dot");
    let ex = cmd(&["export", "--what", "witness", "--format", "dot", "--out", dot.to_str().unwrap(), &data("ebif.json")]);
    assert_eq!(ex.code, 0);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.contains("label=\"x1"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exports() {
    let g = cmd(&["export", "--what", "gamma", &data("single_edge.json")]);
    assert_eq!(g.code, 0);
    assert_eq!(g.stdout.matches("->").count(), 1);
    assert!(g.stdout.contains("m=2"));
    let t = cmd(&["export", "--what", "partition-tree", &data("lattice_3.json")]);
    assert_eq!(t.code, 0);
    assert!(t.stdout.starts_with("digraph partition_tree"));
    let neg = cmd(&["export", "--what", "witness", &data("beta_forcing.json")]);
    assert_eq!(neg.code, 1);
}

#[test]
fn criteria_and_saturations() {
    assert_eq!(cmd(&["criteria", "hm", &data("hm_type1.json")]).code, 0);
    assert_eq!(cmd(&["criteria", "hm", &data("hm_type2.json")]).code, 0);
    assert_eq!(cmd(&["criteria", "compact", &data("lattice_3.json")]).code, 0);
    assert_eq!(cmd(&["criteria", "compact", &data("nonsolvable_cycle.json")]).code, 2);
    assert_eq!(cmd(&["criteria", "loops", &data("loop_closing.json")]).code, 0);
    assert_eq!(cmd(&["criteria", "loops", &data("loop_opening.json")]).code, 1);
    let pos = cmd(&["saturations", &data("banana_positive.json")]);
    assert_eq!(pos.code, 0);
    assert_eq!(json(&pos)["aggregate"], true);
    assert_eq!(cmd(&["saturations", &data("banana_negative.json")]).code, 1);
    // a metrized-complex document is not a series presentation
    assert_eq!(cmd(&["smoothable", &data("banana_positive.json")]).code, 2);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(cmd(&["smoothable", "/nonexistent.json"]).code, 2);
    assert_eq!(cmd(&["frobnicate"]).code, 2);
    let dir = std::env::temp_dir().join(format!("smoothcx-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    let text = std::fs::read_to_string(data("single_edge.json")).unwrap().replace("\"length\": \"1\"", "\"length\": \"0\"");
    std::fs::write(&bad, text).unwrap();
    let out = cmd(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line "), "{}", out.stderr);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_smoothcx");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["smoothable", &data("ebif.json")]), Some(0));
    assert_eq!(code(&["smoothable", &data("beta_forcing.json")]), Some(1));
    assert_eq!(code(&["rho"]), Some(2));
    let out = Command::new(bin).args(["rho", &data("ebif.json")]).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rho"].as_object().unwrap().len(), 8);
}
