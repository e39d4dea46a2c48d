use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgroup")).args(args).env_remove("PGROUP_CAP").output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn series_of_heisenberg() {
    let v = json(&run(&["series", "--group", "heisenberg:3", "--check"]));
    assert_eq!(v["order"], 27);
    assert_eq!(v["d"], 2);
    assert_eq!(v["center"]["order"], 3);
    assert_eq!(v["frattini_order"], 3);
    assert_eq!(v["T"], 1);
}

#[test]
fn h1_values() {
    let v = json(&run(&["h1", "--group", "heisenberg:3", "--module", "center"]));
    assert_eq!((v["der_dim"].as_u64(), v["ider_dim"].as_u64(), v["h1_dim"].as_u64()), (Some(2), Some(0), Some(2)));
    let v = json(&run(&["h1", "--group", "elem:3,2", "--module", "regular"]));
    assert_eq!(v["h1_dim"], 0);
    assert_eq!(v["cr"], true);
    let v = json(&run(&["h1", "--group", "d:3,3", "--quotient", "frattini"]));
    assert_eq!(v["h1_dim"], 3);
    let v = json(&run(&["h1", "--group", "d:2,3", "--module", "regular:frattini"]));
    assert_eq!(v["module_dim"], 9);
    assert_eq!(v["h1_dim"], 1);
}

#[test]
fn derivations_and_check() {
    let v = json(&run(&["derivations", "--group", "cyclic:3,1", "--module", "regular"]));
    assert_eq!(v["der_dim"], 2);
    assert_eq!(v["basis"].as_array().unwrap().len(), 2);
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"gen_images":[[1]]}"#).unwrap();
    let v = json(&run(&["derivations", "--group", "cyclic:3,1", "--check", good.to_str().unwrap()]));
    assert_eq!(v["valid"], true);
    assert_eq!(v["inner"], false);
    // H(3) into the trivial module: c = [b,a] must go to 0.
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"gen_images":[[0],[0],[1]]}"#).unwrap();
    let out = run(&["derivations", "--group", "heisenberg:3", "--check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn noninner_round_trip() {
    let out = run(&["noninner", "--group", "maxclass5:3"]);
    let v = json(&out);
    assert!(v["path"].as_str().unwrap().starts_with("Theorem 01 at i=0"));
    assert_eq!(v["inner_scan"], "exhausted 243 candidates");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let v = json(&run(&["noninner", "--check", path.to_str().unwrap()]));
    assert_eq!(v["valid"], true);
}

#[test]
fn verify_single_group() {
    let v = json(&run(&["verify", "--group", "meta:3", "--jobs", "1"]));
    assert_eq!(v[0]["oracle"], "exists");
    assert_eq!(v[0]["agree"], true);
    let v = json(&run(&["verify", "--group", "elem:3,3"]));
    assert_eq!(v[0]["oracle"], "skipped");
    assert_eq!(v[0]["pipeline"], "n/a (abelian)");
}

#[test]
fn oracle_counts() {
    let v = json(&run(&["oracle-aut", "--group", "heisenberg:3"]));
    assert_eq!(v["automorphisms"], 432);
    assert_eq!(v["inner"], 9);
    assert!(v["noninner_order_p"].as_u64().unwrap() > 0);
    let v = json(&run(&["oracle-aut", "--group", "elem:3,2"]));
    assert_eq!(v["automorphisms"], 48);
}

#[test]
fn export_and_file_round_trip() {
    let out = run(&["export", "--group", "meta:3", "--pretty"]);
    let v = json(&out);
    assert_eq!(v["p"], 3);
    assert_eq!(v["n"], 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("meta.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let v = json(&run(&["series", "--file", path.to_str().unwrap()]));
    assert_eq!(v["order"], 27);
    assert_eq!(v["T"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["series", "--group", "nonsense:3"]).status.code(), Some(3));
    assert_eq!(run(&["series", "--bogus-flag"]).status.code(), Some(3));
    assert_eq!(run(&["series", "--group", "heisenberg:3", "--cap", "10"]).status.code(), Some(2));
    let capped = Command::new(env!("CARGO_BIN_EXE_pgroup"))
        .args(["series", "--group", "heisenberg:3"])
        .env("PGROUP_CAP", "26")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(2));
    assert_eq!(run(&["noninner", "--group", "elem:3,2"]).status.code(), Some(4));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.json");
    std::fs::write(&path, "{").unwrap();
    assert_eq!(run(&["noninner", "--group", "heisenberg:3", "--check", path.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["h1", "--group", "heisenberg:3", "--module", "file:/nonexistent.json"]).status.code(), Some(3));
}

#[test]
fn module_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"dim":2,"action":{"1":[[1,1],[0,1]]}}"#).unwrap();
    let spec = format!("file:{}", path.display());
    let v = json(&run(&["h1", "--group", "cyclic:3,1", "--module", &spec]));
    assert_eq!(v["module_dim"], 2);
    assert_eq!(v["h1_dim"], 1);
    // not an action of C_3: A^3 != 1 is fine over F_3, but A = 2I has order 2
    std::fs::write(&path, r#"{"dim":1,"action":{"1":[[2]]}}"#).unwrap();
    assert_eq!(run(&["h1", "--group", "cyclic:3,1", "--module", &spec]).status.code(), Some(3));
}
