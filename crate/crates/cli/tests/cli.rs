use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn focj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_focj")).args(args).output().expect("run focj")
}

fn code(args: &[&str]) -> i32 {
    focj(args).status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fx(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&["check", &fx("mixed_example.json")]), 0);
    let bad = focj(&["check", &fx("bad_context.json")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("not persistent"));
    assert_eq!(code(&["check", &fx("no_such_file.json")]), 2);
}

#[test]
fn malformed_json_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{\"rule\": ").unwrap();
    assert_eq!(code(&["check", p.to_str().unwrap()]), 2);
    std::fs::write(&p, r#"{"rule": "Id", "conclusion": "P(c) =>", "premises": []}"#).unwrap();
    // parses, but the checker rejects it
    assert_eq!(code(&["check", p.to_str().unwrap()]), 1);
    assert_eq!(code(&["elim", p.to_str().unwrap()]), 2);
}

#[test]
fn prove_exit_codes() {
    let em = std::fs::read_to_string(fixture("excluded_middle.seq")).unwrap();
    assert_eq!(code(&["prove", em.trim()]), 0);
    assert_eq!(code(&["prove", "=> forall_i x P(x)", "--depth", "0"]), 3);
    assert_eq!(code(&["prove", "=> P(c) \\/"]), 2);
    assert_eq!(code(&["prove", "=> P(c) ->c P(c)", "--fragment", "mlj"]), 2);
}

#[test]
fn prove_writes_a_checkable_derivation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    assert_eq!(code(&["prove", "=> P(c) \\/ ~c P(c)", "-o", out.to_str().unwrap()]), 0);
    assert_eq!(code(&["check", out.to_str().unwrap()]), 0);
}

#[test]
fn prove_json_status() {
    let o = focj(&["--json", "prove", "=> top"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "proved");
    let o = focj(&["--json", "prove", "=> ~c P(c) ->i (top ->i ~c P(c))"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "refuted");
}

#[test]
fn scenarios() {
    let s: Value = serde_json::from_str(&std::fs::read_to_string(fixture("scenarios.json")).unwrap()).unwrap();
    let model = fx(s["model"].as_str().unwrap());
    for j in s["judgments"].as_array().unwrap() {
        let want = if j["value"].as_bool().unwrap() { 0 } else { 1 };
        let got = code(&["eval", &model, j["world"].as_str().unwrap(), j["formula"].as_str().unwrap()]);
        assert_eq!(got, want, "{}: {} at {}", j["scenario"], j["formula"], j["world"]);
    }
    for seq in s["refuted"].as_array().unwrap() {
        let o = focj(&["--json", "prove", seq.as_str().unwrap()]);
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["status"], "refuted", "{seq}");
    }
}

#[test]
fn elim_removes_cuts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    let o = focj(&["--json", "elim", &fx("one_cut.json"), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v["trace"].as_array().unwrap().is_empty());
    assert_eq!(code(&["check", out.to_str().unwrap()]), 0);
    assert!(!std::fs::read_to_string(&out).unwrap().contains("\"Cut\""));
}

#[test]
fn elim_leaves_cut_free_input_alone() {
    let o = focj(&["--json", "elim", &fx("mixed_example.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let original: Value = serde_json::from_str(&std::fs::read_to_string(fixture("mixed_example.json")).unwrap()).unwrap();
    assert_eq!(v["derivation"], original);
    assert!(v["trace"].as_array().unwrap().is_empty());
}

#[test]
fn model_commands() {
    let m = fx("two_world_model.json");
    assert_eq!(code(&["eval", &m, "w", "~c P(c)"]), 0);
    assert_eq!(code(&["eval", &m, "v", "~c P(c)"]), 1);
    assert_eq!(code(&["eval", &m, "u", "P(c)"]), 2);
    assert_eq!(code(&["heredity", &m, "~c P(c)"]), 1);
    assert_eq!(code(&["heredity", &m, "P(c) ->i P(c)"]), 0);
}

#[test]
fn countermodel_exit_codes() {
    assert_eq!(code(&["countermodel", "=> top"]), 1);
    assert_eq!(code(&["countermodel", "=> P(c) \\/ ~i P(c)"]), 0);
    assert_eq!(code(&["countermodel", "=> P(c)", "--bounds", "x"]), 2);
}

#[test]
fn help_is_not_an_error() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 2);
}
