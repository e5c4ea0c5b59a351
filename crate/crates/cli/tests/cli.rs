use std::path::PathBuf;
use std::process::{Command, Output};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn seqtc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqtc")).args(args).output().expect("run seqtc")
}

fn model(name: &str) -> String {
    models().join(format!("{name}.model")).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_fixtures() {
    for name in ["ky", "hyperbolic_truncated", "not_tncz", "stiefel_n2", "odd_sphere_point", "s4_point"] {
        let o = seqtc(&["validate", &model(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("d^2 = 0"));
    }
}

#[test]
fn bad_model_exit_codes() {
    let o = seqtc(&["validate", &model("bad_leibniz")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d(d(w))"));

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.model");
    std::fs::write(&empty, "[generators]\n").unwrap();
    assert_eq!(seqtc(&["validate", empty.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(seqtc(&["zcl", dir.path().join("missing.model").to_str().unwrap()]).status.code(), Some(2));

    let plain = dir.path().join("plain.model");
    std::fs::write(&plain, "[generators]\nx = 3\n").unwrap();
    assert_eq!(seqtc(&["validate", plain.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(seqtc(&["zcl", plain.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn stiefel_tc_is_three() {
    let o = seqtc(&["tc", &model("stiefel_n2"), "--r", "2", "--keep", "x,z", "--max-degree", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("TC_2 = 3 [conditional"), "{text}");
    assert!(text.contains("3 via fiber_lower_bound"));
    assert!(text.contains("3 via odd_degree_extension"));
}

#[test]
fn ky_zcl_json() {
    let o = seqtc(&["zcl", &model("ky"), "--r", "4", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "zcl");
    assert_eq!(v["report"]["status"]["kind"], "exact");
    assert!(v["report"]["value"].as_u64().unwrap() <= 8);
}

#[test]
fn json_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |file: &str| {
        let path = dir.path().join(file);
        let args = ["tc", &model("stiefel_n2"), "--keep", "x,z", "--json", path.to_str().unwrap()];
        assert_eq!(seqtc(&args).status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn hyperbolic_witness() {
    let o = seqtc(&["htc-witness", &model("hyperbolic_truncated"), "--k", "2", "--max-degree", "14"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("factors: (x1 - x2)(y1 - y2)(t1 - t2)"), "{text}");
    assert!(text.contains("3 <= HTC_2 [modulo truncation"));
}

#[test]
fn diffnil_reports_violation() {
    assert_eq!(seqtc(&["diffnil", &model("ky"), "--rmax", "4"]).status.code(), Some(0));
    let o = seqtc(&["diffnil", &model("not_tncz"), "--rmax", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("VIOLATED"));
}

#[test]
fn genfun_fit() {
    let o = seqtc(&["genfun", &model("ky"), "--rmax", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("P(z) = 3z, P(1) = 3"));
}

#[test]
fn assertion_flag_parsing() {
    let o = seqtc(&["tc", &model("s4_point"), "--assert", "nonsense=because"]);
    assert_eq!(o.status.code(), Some(1));
}
