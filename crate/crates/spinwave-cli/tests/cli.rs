//! End-to-end checks of the batch front-end: exit codes, config
//! validation, and byte-identical CSV output for identical seeds.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinwave"))
}

#[test]
fn splitting_suite_exits_zero() {
    let out = bin()
        .args(["verify-splitting", "--trials", "3", "--spin-max", "1.5", "--seed", "9"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("exactly zero"), "{}", text);
    assert!(text.contains("0 failures"), "{}", text);
}

#[test]
fn unknown_config_key_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "command = \"peel\"\nwombat = 3\n").unwrap();
    let out = bin()
        .args(["run", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("wombat"), "{}", err);
}

#[test]
fn integer_weight_is_a_config_error() {
    let out = bin()
        .args(["peel", "--weights", "-3.0", "--spin-max", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("non-integer"),
        "error should state the non-integer requirement: {}",
        err
    );
}

#[test]
fn peel_csv_is_byte_identical_across_runs() {
    let run = |dir: &std::path::Path| {
        let out = bin()
            .args([
                "peel",
                "--weights",
                "-2.5",
                "--spin-max",
                "0.5",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{:?}", out);
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    run(d1.path());
    run(d2.path());
    for name in ["samples_s1_d-2.5.csv", "fits_s1_d-2.5.csv"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{} differs between identical runs", name);
    }
}

#[test]
fn peel_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "command = \"peel\"\nspins = [0.5]\nweights = [-2.5]\n",
    )
    .unwrap();
    let out = bin()
        .args(["run", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fitted"), "{}", text);
}
