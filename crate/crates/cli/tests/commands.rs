use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pupil-cover"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not a report ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SINGLE: &str = r#"{"objective_radius": 1.0, "pupils": [{"x": 0, "y": 0, "r": 0.3}]}"#;
const THREE: &str = r#"{"objective_radius": 1.0, "pupils": [
    {"x": 0, "y": 0, "r": 0.5}, {"x": 1, "y": 0, "r": 0}, {"x": -1, "y": 0, "r": 0}]}"#;

#[test]
fn decide_exit_codes() {
    let dir = TempDir::new().unwrap();
    let single = write(&dir, "single.json", SINGLE);
    let three = write(&dir, "three.json", THREE);

    let out = run(&["decide", s(&single)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["covered"], false);

    let out = run(&["decide", s(&three)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["covered"], true);
}

#[test]
fn invalid_input_exits_two_and_names_the_field() {
    let dir = TempDir::new().unwrap();
    let negative = write(
        &dir,
        "neg.json",
        r#"{"objective_radius": 1, "pupils": [{"x": 0, "y": 0, "r": -0.1}]}"#,
    );
    let out = run(&["decide", s(&negative)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pupils[0].r"));

    let empty = write(
        &dir,
        "empty.json",
        r#"{"objective_radius": 1, "pupils": []}"#,
    );
    let out = run(&["alpha", s(&empty)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pupils"));

    let out = run(&["decide", s(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(2));

    let single = write(&dir, "single.json", SINGLE);
    let out = run(&["optimize", s(&single), "--strategy", "move+nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
}

#[test]
fn alpha_of_single_pupil() {
    let dir = TempDir::new().unwrap();
    let single = write(&dir, "single.json", SINGLE);
    let out = run(&["alpha", s(&single)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["result"]["alpha_star"].as_f64().unwrap() - 0.4).abs() < 1e-9);
    assert_eq!(r["result"]["per_disk_alpha"].as_array().unwrap().len(), 1);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn minsum_reaches_half_radius() {
    let dir = TempDir::new().unwrap();
    let single = write(&dir, "single.json", SINGLE);
    let out = run(&["minsum", s(&single)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["result"]["sum_of_radii"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn infeasible_radius_cap_exits_three_with_error_report() {
    let dir = TempDir::new().unwrap();
    let wide = write(
        &dir,
        "wide.json",
        r#"{"objective_radius": 1, "pupils": [{"x": -1, "y": 0, "r": 0.1}, {"x": 1, "y": 0, "r": 0.1}]}"#,
    );
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "minsum",
        s(&wide),
        "--max-radius",
        "0.01",
        "--out",
        s(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(r["result"]["error"].is_string());
}

#[test]
fn prime_design_has_sixty_four_pupils() {
    let out = run(&[
        "design-prime",
        "--objective-radius",
        "4",
        "--pupil-radius",
        "0.70710678",
        "--verify",
        "120",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["pupil_count"], 64);
    assert_eq!(r["result"]["p"], 2);
    assert_eq!(r["result"]["grid_check_covered"], true);
    assert_eq!(
        r["result"]["design"]["pupils"].as_array().unwrap().len(),
        64
    );
}

#[test]
fn three_pupil_design_is_covered() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("design.json");
    let out = run(&[
        "design-three",
        "--objective-radius",
        "2",
        "--out",
        s(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((r["result"]["sum_of_radii"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    // The design section is itself a valid configuration file.
    let cfg_path = write(&dir, "cfg.json", &r["result"]["design"].to_string());
    assert_eq!(run(&["decide", s(&cfg_path)]).status.code(), Some(0));
}

#[test]
fn optimized_config_round_trips_through_the_cli() {
    let dir = TempDir::new().unwrap();
    let single = write(&dir, "single.json", SINGLE);
    let out = run(&["optimize", s(&single), "--strategy", "move+minarea"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let final_cfg = &r["result"]["trace"]["final_config"];
    let path = write(&dir, "final.json", &final_cfg.to_string());
    let out = run(&["decide", s(&path)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn render_counts_elements_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let three = write(&dir, "three.json", THREE);
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    assert_eq!(
        run(&["render", s(&three), "--out", s(&a)]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["render", s(&three), "--out", s(&b)]).status.code(),
        Some(0)
    );
    let svg = std::fs::read(&a).unwrap();
    assert_eq!(svg, std::fs::read(&b).unwrap());
    let text = String::from_utf8(svg).unwrap();
    assert_eq!(text.matches(r#"class="objective""#).count(), 1);
    assert_eq!(text.matches(r#"class="pupil""#).count(), 3);

    let only = dir.path().join("only.svg");
    assert_eq!(
        run(&[
            "render",
            s(&three),
            "--out",
            s(&only),
            "--layers",
            "pupils,objective"
        ])
        .status
        .code(),
        Some(0)
    );
    let text = std::fs::read_to_string(&only).unwrap();
    assert_eq!(text.matches(r#"class="acs""#).count(), 0);
    assert_eq!(text.matches(r#"class="pupil""#).count(), 3);
}

#[test]
fn unwritable_output_exits_two() {
    let dir = TempDir::new().unwrap();
    let single = write(&dir, "single.json", SINGLE);
    let bad = dir.path().join("no/such/dir/out.json");
    assert_eq!(
        run(&["alpha", s(&single), "--out", s(&bad)]).status.code(),
        Some(2)
    );
}

#[test]
fn strategies_lists_builtins() {
    let out = run(&["strategies"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["alpha", "exhaustive", "minarea", "minsum", "move"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}
