//! Exit codes, output formats and determinism of the `twsolve` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn twsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twsolve"))
        .args(args)
        .env("TWSOLVE_LOG", "quiet")
        .output()
        .expect("binary runs")
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twsolve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn solve_json_reports_balance_and_families() {
    let out = twsolve(&[
        "solve",
        data("mkdv.pde").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(j["balance"], serde_json::json!({"m": 1, "n": 2}));
    let families = j["families"].as_array().unwrap();
    assert!(families.len() >= 16);
    for f in families {
        for key in [
            "id",
            "assignment",
            "constraints",
            "free",
            "branch_kind",
            "u",
            "v",
            "latex_u",
            "latex_v",
        ] {
            assert!(f.get(key).is_some(), "missing {key}");
        }
        assert_eq!(f["verified_symbolic"], true);
        assert!(f["verified_numeric"]["max_residual"].as_f64().unwrap() < 1e-8);
    }
    assert_eq!(j["search"]["complete"], true);
}

#[test]
fn reports_are_byte_identical() {
    let mkdv = data("mkdv.pde");
    let args = [
        "solve",
        mkdv.to_str().unwrap(),
        "--format",
        "json",
        "--seed",
        "7",
    ];
    assert_eq!(twsolve(&args).stdout, twsolve(&args).stdout);
}

#[test]
fn syntax_error_exits_two() {
    let p = scratch_file(
        "broken.pde",
        "system \"b\"\nfunctions u(x,t)\neq: u_t = u_x +\n",
    );
    let out = twsolve(&["solve", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3:"));
}

#[test]
fn missing_input_exits_one() {
    assert_eq!(
        twsolve(&["solve", "/nonexistent/input.pde"]).status.code(),
        Some(1)
    );
}

#[test]
fn balance_failure_exits_three() {
    let p = scratch_file(
        "unbalanced.pde",
        "system \"b\"\nfunctions u(x,t)\neq: u_t = u_x - u\n",
    );
    assert_eq!(
        twsolve(&["balance", p.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

#[test]
fn only_constant_solutions_exit_four() {
    let out = twsolve(&["solve", data("mkdv_single.pde").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reduce_and_balance_text() {
    let mkdv = data("mkdv.pde");
    let out = twsolve(&["reduce", mkdv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("[scale -2]") && text.contains("[scale 1]"),
        "{text}"
    );
    let out = twsolve(&["balance", mkdv.to_str().unwrap()]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "m = 1, n = 2\n");
}

#[test]
fn catalog_table_has_sixteen_rows() {
    let out = twsolve(&["catalog", data("mkdv.pde").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with('u')).count(), 16);
}

#[test]
fn output_flag_writes_file() {
    let target = scratch_file("report.tex", "");
    let out = twsolve(&[
        "solve",
        data("mkdv.pde").to_str().unwrap(),
        "--format",
        "latex",
        "--kinds",
        "tanh",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let tex = std::fs::read_to_string(target).unwrap();
    assert!(tex.contains("\\tanh") && !tex.contains("\\coth"));
}

#[test]
fn bad_flags_are_rejected() {
    let mkdv = data("mkdv.pde");
    assert_eq!(
        twsolve(&["solve", mkdv.to_str().unwrap(), "--kinds", "sinh"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        twsolve(&["solve", mkdv.to_str().unwrap(), "--degrees", "0,2"])
            .status
            .code(),
        Some(2)
    );
}
