use std::path::Path;
use std::process::{Command, Output};

use setout_core::instance::instance_from_json;
use setout_core::relational::Database;

fn setout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_setout")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let out = dir.join(name);
    let mut a = vec!["gen"];
    a.extend_from_slice(args);
    a.extend_from_slice(&["-o", path_str(&out)]);
    let o = setout(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path_str(&out).to_string()
}

#[test]
fn gen_is_deterministic_and_loads() {
    let a = setout(&["gen", "--kind", "setcover", "--seed", "7", "--n", "6", "--m", "4"]);
    let b = setout(&["gen", "--kind", "setcover", "--seed", "7", "--n", "6", "--m", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    instance_from_json(&String::from_utf8(a.stdout).unwrap()).unwrap();
    let c = setout(&["gen", "--kind", "setcover", "--seed", "8", "--n", "6", "--m", "4"]);
    assert_ne!(b.stdout, c.stdout);
}

#[test]
fn every_kind_loads() {
    for kind in ["general", "geometric", "geometric-disjoint", "setcover"] {
        let o = setout(&["gen", "--kind", kind, "--seed", "3", "--n", "12", "--m", "4"]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        instance_from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    }
    let o = setout(&["gen", "--kind", "relational", "--seed", "3", "--n", "4", "--g", "3"]);
    assert!(o.status.success());
    Database::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
}

#[test]
fn solve_writes_validated_solution_and_record() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_to(dir.path(), "inst.json", &["--kind", "geometric", "--seed", "1", "--n", "20", "--m", "4", "--k", "2", "--z", "1"]);
    let sol = dir.path().join("sol.json");
    let o = setout(&["solve", "--algo", "gcso-mwu", "--k", "2", "--z", "1", "--eps", "0.2", "-i", &inst, "-o", path_str(&sol)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert!(s["centers"].is_array());
    let rec: setout_cli::record::RunRecord = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sol.json.record.json")).unwrap()).unwrap();
    assert!(rec.metrics.valid);
    assert_eq!(rec.algo, "gcso");
    assert!(rec.opt.is_none());
}

#[test]
fn oracle_then_solve_fills_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_to(dir.path(), "tiny.json", &["--kind", "general", "--seed", "2", "--n", "10", "--m", "4", "--k", "2", "--z", "1"]);
    let o = setout(&["oracle", "-i", &inst, "--k", "2", "--z", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let opt: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    let o = setout(&["solve", "--algo", "cso", "--k", "2", "--z", "1", "-i", &inst]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["record"]["opt"].as_f64(), Some(opt));
    let ratio = v["record"]["ratio"].as_f64().unwrap();
    assert!(ratio <= 2.0, "ratio {ratio}");
}

#[test]
fn relational_solvers_run() {
    let dir = tempfile::tempdir().unwrap();
    let db = gen_to(dir.path(), "db.json", &["--kind", "relational", "--seed", "4", "--n", "4", "--g", "2", "--bad", "1"]);
    for algo in ["rcro", "rcto1", "rcto"] {
        let o = setout(&["solve", "--algo", algo, "--k", "1", "--z", "1", "-i", &db]);
        assert!(o.status.success(), "{algo}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["record"]["metrics"]["valid"], true);
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(setout(&["solve", "--algo", "nope", "--k", "1", "--z", "1", "-i", "x.json"]).status.code(), Some(2));
    assert_eq!(setout(&["solve", "--k", "1"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_to(dir.path(), "g.json", &["--kind", "general", "--seed", "1", "--n", "10", "--m", "3"]);
    // A general instance has no rectangles.
    assert_eq!(setout(&["solve", "--algo", "gcso", "--k", "1", "--z", "1", "-i", &inst]).status.code(), Some(2));
    assert_eq!(setout(&["solve", "--algo", "cso", "--k", "0", "--z", "1", "-i", &inst]).status.code(), Some(2));
}

#[test]
fn refusals_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let db = gen_to(dir.path(), "db.json", &["--kind", "relational", "--seed", "5", "--n", "5", "--g", "3"]);
    let o = setout(&["solve", "--algo", "rcto", "--k", "2", "--z", "2", "--cap-trials", "4", "-i", &db]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let inst = gen_to(dir.path(), "g.json", &["--kind", "general", "--seed", "1", "--n", "30", "--m", "6"]);
    let o = setout(&["oracle", "-i", &inst, "--k", "3", "--z", "2", "--cap-brute", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bench_writes_csv() {
    let o = setout(&["bench", "--algo", "gcso", "--ns", "12,16", "--ms", "3", "--ks", "1", "--zs", "1", "--oracle"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let headers = rd.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "ratio"));
    assert_eq!(rd.records().count(), 2);
}
