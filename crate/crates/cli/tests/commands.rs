use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn solid(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("solids").join(name)
}

fn quadsolid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadsolid"))
        .args(args)
        .env_remove("QS_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn result(v: &Value, name: &str) -> f64 {
    v["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name)
        .unwrap_or_else(|| panic!("no result {name}"))["value"]
        .as_f64()
        .unwrap()
}

fn check<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn octree_volume_of_three_hyperboloids() {
    let f = solid("revenge.solid");
    let out = quadsolid(&["volume", "--file", f.to_str().unwrap(), "--method", "octree", "--tol", "2e-3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((result(&v, "volume") - 5.545177444479562).abs() <= 2e-3);
    assert_eq!(v["results"][0]["method"], "cubature");
}

#[test]
fn monte_carlo_volume_is_reproducible() {
    let f = solid("revenge.solid");
    let args = ["volume", "--file", f.to_str().unwrap(), "--method", "mc", "--n", "4000000", "--seed", "42"];
    let a = json(&quadsolid(&args));
    let b = json(&quadsolid(&args));
    assert_eq!(a["results"], b["results"]);
    let value = result(&a, "volume");
    let stderr = a["results"][0]["error_bound_or_stderr"].as_f64().unwrap();
    assert!((value - 5.545177444479562).abs() <= 4.0 * stderr);
}

#[test]
fn thread_count_does_not_change_output() {
    let f = solid("tricylinder.solid");
    let run = |t: &str| {
        let out = quadsolid(&["volume", "--file", f.to_str().unwrap(), "--method", "mc", "--n", "500000", "--threads", t]);
        json(&out)["results"].clone()
    };
    assert_eq!(run("1"), run("8"));
    let env = Command::new(env!("CARGO_BIN_EXE_quadsolid"))
        .args(["volume", "--file", f.to_str().unwrap(), "--method", "mc", "--n", "500000"])
        .env("QS_THREADS", "3")
        .output()
        .unwrap();
    let v = json(&env);
    assert_eq!(v["inputs"]["threads"], 3);
    assert_eq!(v["results"], run("1"));
}

#[test]
fn unbounded_solid_needs_a_box() {
    let f = solid("unbounded.solid");
    let out = quadsolid(&["volume", "--file", f.to_str().unwrap(), "--method", "mc"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    let out = quadsolid(&[
        "volume", "--file", f.to_str().unwrap(), "--method", "mc", "--n", "10000", "--bbox", "-1,1,-1,1,-1,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn parse_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.solid");
    std::fs::write(&bad, "x^2 <= 1\nx^3 + y <= 2\n").unwrap();
    let out = quadsolid(&["volume", "--file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("constraint 2"), "{msg}");

    let missing = dir.path().join("missing.solid");
    let out = quadsolid(&["volume", "--file", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn revenge_report() {
    let out = quadsolid(&["revenge", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!((result(&v, "I") - 0.06438239).abs() < 1e-8);
    assert!((result(&v, "V1") - 0.69314718).abs() < 1e-8);
    assert!((result(&v, "total") - 5.54517744).abs() < 1e-8);
    assert_eq!(check(&v, "li_equals_I")["tolerance"].as_f64(), Some(1e-9));
    assert_eq!(check(&v, "mc_4sigma")["pass"], true);
}

#[test]
fn bicylinder_ratios() {
    let v = json(&quadsolid(&["classics", "--shape", "bicylinder", "--radius", "1", "--angle", "90"]));
    let c = check(&v, "box_ratio_two_thirds");
    assert_eq!(c["pass"], true);
    assert_eq!(c["tolerance"].as_f64(), Some(2e-3));
    assert!((result(&v, "volume") - 16.0 / 3.0).abs() < 0.016);

    let out = quadsolid(&["classics", "--shape", "bicylinder", "--radius", "1", "--angle", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let c = check(&v, "box_ratio_two_thirds");
    assert_eq!(c["pass"], true);
    assert_eq!(c["tolerance"].as_f64(), Some(5e-3));
}

#[test]
fn tricylinder_oracles_agree() {
    let out = quadsolid(&["classics", "--shape", "tricylinder", "--radius", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(check(&v, "octree_vs_mc")["pass"], true);
    assert!((result(&v, "volume") - 4.68629).abs() < 0.02);
}

#[test]
fn invalid_classics_arguments() {
    let out = quadsolid(&["classics", "--shape", "bicylinder", "--angle", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = quadsolid(&["classics", "--shape", "tricylinder", "--radius", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mesh_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("star.obj");
    let out = quadsolid(&["mesh", "--out", path.to_str().unwrap(), "--rulings", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(result(&v, "segments"), 12.0);
    assert_eq!(result(&v, "vertices"), 8.0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 8);
    assert_eq!(text.lines().filter(|l| l.starts_with("l ")).count(), 12);

    let path = dir.path().join("figure.obj");
    let v = json(&quadsolid(&["mesh", "--out", path.to_str().unwrap(), "--rulings", "17"]));
    // star edges, 34 rulings on each of 24 curved pieces, 12 quarter circles in 18 arcs
    assert_eq!(result(&v, "segments"), (12 + 24 * 34 + 12 * 18) as f64);
    assert_eq!(result(&v, "faces"), 0.0);

    let path = dir.path().join("patches.obj");
    let v = json(&quadsolid(&["mesh", "--out", path.to_str().unwrap(), "--rulings", "3", "--patches", "--patch-resolution", "4"]));
    assert_eq!(result(&v, "faces"), (24 * 2 * 16) as f64);
}

#[test]
fn mesh_to_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no_such_dir").join("out.obj");
    let out = quadsolid(&["mesh", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!path.exists());
    assert!(!path.parent().unwrap().exists());
}
