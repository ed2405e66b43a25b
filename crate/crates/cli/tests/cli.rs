use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::Command;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> (i32, Value, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_fellbundle")).current_dir(dir).args(args).output().expect("binary runs");
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out.status.code().expect("exit code"), v, out.stdout)
}

fn file(dir: &TempDir, name: &str, body: &str) -> String {
    fs::write(dir.path().join(name), body).unwrap();
    name.to_string()
}

fn z2_map(t: f64) -> String {
    format!(r#"{{"kind": "bundle_map", "source": {{"group_bundle": {{"cyclic": 2}}}}, "multiplier": [[1, 0], [{t}, 0]]}}"#)
}

#[test]
fn pd_map_exits_zero_with_its_margin() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "t.json", &z2_map(0.5));
    let (code, v, _) = run(dir.path(), &["pd-check", &f]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    assert!((v["result"]["exact"]["margin"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["result"]["consistent"], true);
    assert!(v["result"]["witness"].is_null());
    assert!(v["result"]["exact"].get("gram").is_none());
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["seed"], 0);
}

#[test]
fn non_pd_map_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "t.json", &z2_map(2.0));
    let (code, v, _) = run(dir.path(), &["pd-check", &f, "--full"]);
    assert_eq!(code, 1);
    assert!((v["result"]["exact"]["margin"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    let w = &v["result"]["witness"];
    assert!(!w["terms"].as_array().unwrap().is_empty());
    assert!(w["min_eigenvalue"].as_f64().unwrap() < 0.0);
    assert_eq!(v["result"]["exact"]["gram"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let truncated = file(&dir, "a.json", r#"{"kind": "bundle_map","#);
    let unknown = file(&dir, "b.json", r#"{"kind": "nonsense"}"#);
    let ragged = file(&dir, "c.json", r#"{"kind": "bundle_map", "source": {"group_bundle": {"cyclic": 2}}, "multiplier": [[1, 0]]}"#);
    for f in [truncated.as_str(), unknown.as_str(), ragged.as_str(), "missing.json"] {
        let (code, v, _) = run(dir.path(), &["validate", f]);
        assert_eq!(code, 2, "{f}");
        assert_eq!(v["error"]["kind"], "malformed_input");
    }
    // right file, wrong command
    let eq = file(&dir, "e.json", r#"{"kind": "equivalence", "identity": {"matrix_algebra": 2}}"#);
    assert_eq!(run(dir.path(), &["pd-check", &eq]).0, 2);
}

#[test]
fn gns_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let id = file(&dir, "id.json", &z2_map(0.0));
    let scaled = file(&dir, "c.json", r#"{"kind": "bundle_map", "source": {"group_bundle": {"cyclic": 2}}, "multiplier": [[2.5, 0], [0, 0]]}"#);
    for (f, out) in [(id.as_str(), "out_id"), (scaled.as_str(), "out_c")] {
        let (code, v, _) = run(dir.path(), &["gns", f, "--out", out]);
        assert_eq!(code, 0, "{v}");
        assert!(v["result"]["residual"].as_f64().unwrap() <= 1e-12);
        assert_eq!(v["result"]["xi_cyclic"], true);
        for name in ["hilbert_bundle.json", "action.json", "gns.json"] {
            assert!(dir.path().join(out).join(name).exists());
        }
        // written files are valid inputs themselves
        let (code, _, _) = run(dir.path(), &["validate", &format!("{out}/gns.json")]);
        assert_eq!(code, 0);
    }
}

#[test]
fn gns_refuses_non_pd_input() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "t.json", &z2_map(2.0));
    let (code, v, _) = run(dir.path(), &["gns", &f, "--out", "never"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "check_failed");
    assert!(!v["result"]["witness"].is_null());
    assert!(!dir.path().join("never").exists());
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "t.json", &z2_map(2.0));
    let a = run(dir.path(), &["pd-check", &f, "--seed", "7", "--samples", "50"]).2;
    let b = run(dir.path(), &["pd-check", &f, "--seed", "7", "--samples", "50"]).2;
    assert_eq!(a, b);
    let c = file(&dir, "c.json", r#"{"kind": "correspondence", "action": {"l2": {"group_bundle": {"cyclic": 3}}}, "x": [[1, 0], [0, 0], [0, 0]]}"#);
    let a = run(dir.path(), &["correspond", &c, "--samples", "20"]).2;
    let b = run(dir.path(), &["correspond", &c, "--samples", "20"]).2;
    assert_eq!(a, b);
}

#[test]
fn correspond_reports_cyclicity() {
    let dir = TempDir::new().unwrap();
    let c = file(&dir, "c.json", r#"{"kind": "correspondence", "action": {"regular": {"group_bundle": {"cyclic": 3}}}, "x": [[1, 0], [0, 0], [0, 0]]}"#);
    let (code, v, _) = run(dir.path(), &["correspond", &c, "--samples", "20"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["x"]["cyclic"], true);
    assert_eq!(v["result"]["x"]["rank_profile"], serde_json::json!([3, 3, 3]));
    // the zero vector generates nothing, which is not an axiom failure
    let z = file(&dir, "z.json", r#"{"kind": "correspondence", "action": {"regular": {"group_bundle": {"cyclic": 3}}}, "x": [[0, 0], [0, 0], [0, 0]]}"#);
    let (code, v, _) = run(dir.path(), &["correspond", &z, "--samples", "20"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["x"]["generated_dim"], 0);
}

#[test]
fn morita_and_build() {
    let dir = TempDir::new().unwrap();
    let e = file(&dir, "e.json", r#"{"kind": "equivalence", "identity": {"group_bundle": {"symmetric": 3}}}"#);
    let (code, v, _) = run(dir.path(), &["build", &e, "--out", "full.json"]);
    assert_eq!(code, 0, "{v}");
    let (code, v, _) = run(dir.path(), &["morita", "full.json", "--samples", "10"]);
    assert_eq!(code, 0, "{v}");
    // a corner of the diagonal algebra is not full on the left
    let corner = r#"{"kind": "equivalence",
        "left": {"group": {"cyclic": 1}, "ambient_dim": 2, "fibers": {"0": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]}, "unital": true},
        "right": {"matrix_algebra": 1},
        "fibers": {"0": [[[[1,0]],[[0,0]]]]}}"#;
    let c = file(&dir, "corner.json", corner);
    let (code, v, _) = run(dir.path(), &["morita", &c, "--samples", "10"]);
    assert_eq!(code, 1, "{v}");
    let failed: Vec<&str> = v["result"]["axioms"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["left_fullness"]);
}

#[test]
fn validate_and_report_flag_broken_bundles() {
    let dir = TempDir::new().unwrap();
    // the off-diagonal unit alone is not closed under adjoints
    let b = file(&dir, "b.json", r#"{"kind": "bundle", "group": {"cyclic": 1}, "ambient_dim": 2, "fibers": {"0": [[[[0,0],[1,0]],[[0,0],[0,0]]]]}}"#);
    let (code, v, _) = run(dir.path(), &["validate", &b]);
    assert_eq!(code, 1, "{v}");
    let m = file(&dir, "m.json", r#"{"kind": "bundle", "matrix_algebra": 3}"#);
    let (code, v, _) = run(dir.path(), &["report", &m]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["saturated"], true);
    assert_eq!(v["assumptions"]["groups_finite_hence_amenable"], true);
}
