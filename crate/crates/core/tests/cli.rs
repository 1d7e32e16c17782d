use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use resolvent_cycles::harness::output::result_from_json;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn rcycles(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcycles"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn verify_two_balls_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcycles(
        &["verify", config("two_balls.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let result =
        result_from_json(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert!(result.all_checks_pass());
    assert_eq!(result.settings[0].starts.len(), 20);
    assert!(dir.path().join("meta.json").exists());
    for k in 0..20 {
        let csv = fs::read_to_string(dir.path().join(format!("trace_{k}.csv"))).unwrap();
        assert!(csv.starts_with("iter,residual,gap_norm\n"));
    }
}

#[test]
fn loose_tolerance_fails_a_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcycles(
        &[
            "verify",
            config("two_balls.json").to_str().unwrap(),
            "--tol",
            "1e-2",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    let result =
        result_from_json(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert!(!result.all_checks_pass());
}

#[test]
fn constant_shift_does_not_converge() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcycles(
        &["solve", config("constant_shift.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    let result =
        result_from_json(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert!(result.consensus_gap.is_none());
    assert!(result.settings[0]
        .starts
        .iter()
        .all(|s| !s.converged && s.gap.is_none()));
}

#[test]
fn config_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"dimension": 2, "operators": [
            {"kind": "ball", "center": [0, 0], "radius": -1},
            {"kind": "ball", "center": [1, 0], "radius": 1}]}"#,
    )
    .unwrap();
    let o = rcycles(&["solve", bad.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("operators[0].radius"));

    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        code(&rcycles(
            &["solve", bad.to_str().unwrap()],
            &dir.path().join("out")
        )),
        3
    );

    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&rcycles(
            &["solve", missing.to_str().unwrap()],
            &dir.path().join("out")
        )),
        3
    );
}

#[test]
fn result_json_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("overlapping_boxes.json");
    let args = ["verify", cfg.to_str().unwrap(), "--seed", "7"];
    assert_eq!(code(&rcycles(&args, a.path())), 0);
    assert_eq!(code(&rcycles(&args, b.path())), 0);
    let ra = fs::read(a.path().join("result.json")).unwrap();
    let rb = fs::read(b.path().join("result.json")).unwrap();
    assert_eq!(ra, rb);
    let ta = fs::read(a.path().join("trace_3.csv")).unwrap();
    assert_eq!(ta, fs::read(b.path().join("trace_3.csv")).unwrap());

    let text = String::from_utf8(ra).unwrap();
    let parsed = result_from_json(&text).unwrap();
    assert_eq!(parsed.seed, 7);
    assert_eq!(
        resolvent_cycles::harness::output::result_to_json(&parsed),
        text
    );
}

#[test]
fn duality_on_affine_pair() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcycles(
        &["duality", config("duality_scalar.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let result =
        result_from_json(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    let d = result.duality.unwrap();
    assert!(d.all_pass());
    assert_eq!(d.relations_checked.len(), 6);
    assert!(result.involution.unwrap().pass);

    let o = rcycles(
        &["duality", config("two_balls.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn sweep_reports_every_setting() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcycles(
        &[
            "sweep",
            config("two_balls.json").to_str().unwrap(),
            "--starts",
            "4",
            "--alpha",
            "0.5,1.0",
            "--map",
            "composed,averaged",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let result =
        result_from_json(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    // composed with alpha = 1 is not averaged and is skipped
    assert_eq!(result.settings.len(), 3);
    assert!(result.settings.iter().all(|s| s.converged == 4));
    assert!(result.max_gap_distance.unwrap() <= 1e-6);
    assert!(dir.path().join("trace_s0_0.csv").exists());
}
