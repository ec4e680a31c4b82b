//! End-to-end runs of the binary against the fixture files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stacky-seidel"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn verify_p1_passes() {
    let out = run(&["verify", "--input", &fixture("p1.json")]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_p12_and_h2_pass() {
    for f in ["p12.json", "h2.json"] {
        let out = run(&["verify", "--input", &fixture(f)]);
        assert!(out.status.success(), "{} failed: {}", f, String::from_utf8_lossy(&out.stdout));
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(!text.contains("FAIL"), "{}: {}", f, text);
        assert!(!text.contains("INCONCLUSIVE"), "{}: {}", f, text);
    }
}

#[test]
fn verify_two_dimensional_stacky_fixtures_pass() {
    // the weighted plane and the stacky Hirzebruch surface both carry a
    // twisted sector; the latter also has a degree-zero curve class, and
    // the doubly-extended weighted line runs two box bundles at scale 3
    for f in ["p112.json", "h2s.json", "p13x.json"] {
        let out = run(&["verify", "--input", &fixture(f)]);
        assert!(out.status.success(), "{} failed: {}", f, String::from_utf8_lossy(&out.stdout));
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(!text.contains("FAIL"), "{}: {}", f, text);
        assert!(!text.contains("INCONCLUSIVE"), "{}: {}", f, text);
    }
}

#[test]
fn seidel_h2_ray_two_series() {
    let out = run(&["seidel", "--input", &fixture("h2.json"), "--j", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    // S = D2 (1 + y + 3 y^2 + 10 y^3) and a three-way zero residual
    assert!(text.contains("seidel_element"));
    assert!(text.contains("1  *  [D2]"));
    assert!(text.contains("y2  *  [D2]"));
    assert!(text.contains("y2^(2)  *  [3 D2]"));
    assert!(text.contains("y2^(3)  *  [10 D2]"));
    for line in text.lines().filter(|l| l.contains("(j = 2)")) {
        assert!(line.starts_with("PASS"), "non-passing check: {}", line);
    }
}

#[test]
fn non_weak_fano_is_an_error_without_the_flag() {
    let out = run(&["verify", "--input", &fixture("h3.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("weak Fano"), "stderr: {}", err);
}

#[test]
fn non_weak_fano_reports_not_applicable_with_the_flag() {
    let out = run(&["verify", "--input", &fixture("h3.json"), "--allow-non-weak-fano"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("NOT APPLICABLE"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn structured_output_is_deterministic() {
    let args =
        ["seidel", "--input", &fixture("p12.json"), "--j", "3", "--format", "structured"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "two identical runs must be byte-identical");
    // every line is a JSON record with kind and payload
    for line in String::from_utf8_lossy(&a.stdout).lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("record is JSON");
        assert!(v.get("kind").is_some());
        assert!(v.get("payload").is_some());
    }
}

#[test]
fn broken_input_exits_with_structured_error() {
    let out = run(&["describe", "--input", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    let v: serde_json::Value = serde_json::from_str(err.trim()).expect("error is JSON");
    assert!(v.get("error").is_some());
}

#[test]
fn describe_p13_lists_fractional_ages() {
    let out = run(&["describe", "--input", &fixture("p13.json")]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("age 1/3"));
    assert!(text.contains("age 2/3"));
    assert!(text.contains("weak Fano: yes"));
}

#[test]
fn mirror_p12_prints_twisted_leading_term() {
    let out = run(&["mirror", "--input", &fixture("p12.json")]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("tau_twisted"));
    assert!(text.contains("y1^(1/2) y2  *  [1_[-1]]"), "got: {}", text);
}

#[test]
fn batyrev_routes_agree_via_cli() {
    let out = run(&["batyrev", "--input", &fixture("h2.json"), "--j", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("batyrev routes agree"));
    assert!(text.contains("PASS"));
}
