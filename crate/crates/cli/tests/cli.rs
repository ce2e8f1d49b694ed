use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn recon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recon")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn validate_good_and_corrupted_specs() {
    let o = recon(&["validate", &fixture("tensor2d.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["report"]["status"], "pass");
    for f in ["negative-norm.json", "negative-energy.json", "scaled-omega.json"] {
        let o = recon(&["validate", &fixture(f)]);
        assert_eq!(code(&o), 1, "{f}");
        let r = stdout_json(&o);
        let failing: Vec<&Value> =
            r["report"]["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").collect();
        assert!(!failing.is_empty());
        assert!(failing.iter().any(|c| c.get("witness").is_some()), "{f}");
    }
}

#[test]
fn reconstruct_then_check_all_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mud.json");
    let spec = fixture("tensor2d.json");
    let o = recon(&["reconstruct", &spec, "--dim", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = recon(&["check", path_str(&out), &spec, "--suite", "all"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = stdout_json(&o);
    assert_eq!(r["provenance"]["solver"], "d2-projection");
    assert_eq!(r["report"]["status"], "pass");
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("tensor2d.json");
    let files: Vec<PathBuf> = ["1", "3"]
        .iter()
        .map(|j| {
            let out = dir.path().join(format!("mud{j}.json"));
            let o = recon(&[
                "--jobs",
                j,
                "reconstruct",
                &spec,
                "--dim",
                "2",
                "--solver",
                "general",
                "--out",
                path_str(&out),
            ]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    assert_eq!(std::fs::read(&files[0]).unwrap(), std::fs::read(&files[1]).unwrap());
}

#[test]
fn hypothesis_violation_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mud.json");
    let o = recon(&["reconstruct", &fixture("negative-norm.json"), "--dim", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 2);
    let d = stderr_json(&o);
    assert_eq!(d["error"], "hypothesis");
    assert_eq!(d["report"]["status"], "fail");
    assert!(!out.exists());
}

#[test]
fn usage_and_format_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mud.json");
    let spec = fixture("tensor2d.json");
    let o = recon(&["reconstruct", &spec, "--dim", "3", "--out", path_str(&out)]);
    assert_eq!(code(&o), 3);
    assert_eq!(stderr_json(&o)["error"], "usage");
    let o = recon(&["reconstruct", &spec, "--dim", "4", "--out", path_str(&out)]);
    assert_eq!(code(&o), 3);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"format": "recon-spec/1"}"#).unwrap();
    let o = recon(&["validate", path_str(&bad)]);
    assert_eq!(code(&o), 3);
    assert_eq!(stderr_json(&o)["error"], "format");
    let o = recon(&["check", "--suite", "nonsense", path_str(&bad), path_str(&bad)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn table_from_a_different_spec_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mud.json");
    let o = recon(&["reconstruct", &fixture("tensor2d.json"), "--dim", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    let o = recon(&["check", path_str(&out), &fixture("negative-norm.json")]);
    assert_eq!(code(&o), 3);
    assert!(stderr_json(&o)["message"].as_str().unwrap().contains("hashes to"));
}

#[test]
fn half_integer_cutoff_truncates_the_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mud.json");
    let spec = fixture("tensor2d.json");
    let o = recon(&["reconstruct", &spec, "--dim", "2", "--cutoff", "3/2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(t["provenance"]["cutoff2"], 3);
    let o = recon(&["check", path_str(&out), &spec, "--suite", "restriction"]);
    assert_eq!(code(&o), 0);
    let o = recon(&["reconstruct", &spec, "--dim", "2", "--cutoff", "5", "--out", path_str(&out)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn benchmark_without_translations_is_inconclusive_for_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mud.json");
    let spec = fixture("gegenbauer4.json");
    let o = recon(&["reconstruct", &spec, "--dim", "4", "--out", path_str(&out)]);
    assert_eq!(code(&o), 2, "the benchmark has no full conformal action");
    let o = recon(&["reconstruct", &spec, "--dim", "4", "--no-validate", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = recon(&["check", path_str(&out), &spec, "--suite", "covariance"]);
    assert_eq!(code(&o), 4);
    for s in ["restriction", "parity", "poles", "isotypic"] {
        let o = recon(&["check", path_str(&out), &spec, "--suite", s]);
        assert_eq!(code(&o), 0, "{s}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn export_reproduces_the_shipped_fixtures() {
    for (model, cutoff, file) in [
        ("tensor2d", "2", "tensor2d.json"),
        ("heisenberg", "3", "heisenberg.json"),
        ("negative-norm", "1", "negative-norm.json"),
        ("negative-energy", "1", "negative-energy.json"),
        ("scaled-omega", "1", "scaled-omega.json"),
        ("gegenbauer4", "2", "gegenbauer4.json"),
    ] {
        let o = recon(&["export", model, "--cutoff", cutoff]);
        assert_eq!(code(&o), 0);
        assert_eq!(o.stdout, std::fs::read(fixture(file)).unwrap(), "{model}");
    }
}

#[test]
fn demos_write_three_files() {
    for (model, cutoff, mud) in [("heisenberg", "3", false), ("tensor2d", "2", true), ("gegenbauer4", "3", true)] {
        let dir = tempfile::tempdir().unwrap();
        let o = recon(&["demo", model, "--cutoff", cutoff, "--out", path_str(dir.path())]);
        assert_eq!(code(&o), 0, "{model}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(dir.path().join("spec.json").exists());
        assert_eq!(dir.path().join("mud.json").exists(), mud, "{model}");
        let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(r["report"]["status"], "pass", "{model}");
    }
}
