use std::path::Path;
use std::process::{Command, Output};

fn lamlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamlab"))
        .args(args)
        .env("LAMLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn small_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("small.json");
    let text = format!(
        r#"{{"range":[0,1],"n":[1,2],"radial_divisions":6,"boundary":{{"theta_step_max":0.4,"z_divisions":16}}{extra}}}"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn sequence_writes_the_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), "");
    let out = tmp.path().join("run");
    let o = lamlab(&["sequence", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["run.json", "summary.json", "blowup.csv", "n_1/mesh.obj", "n_2/vertices.csv", "n_2/solve.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("n=1") && stdout.contains("n=2"), "{stdout}");

    let again = tmp.path().join("again");
    let o = lamlab(&["analyze", out.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read(out.join("summary.json")).unwrap(),
        std::fs::read(again.join("summary.json")).unwrap()
    );
}

#[test]
fn n_flag_replaces_the_list() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), "");
    let out = tmp.path().join("run");
    let o = lamlab(&["solve", "--config", &cfg, "--n", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("n_3/mesh.obj").is_file());
    assert!(!out.join("n_1").exists());

    let first = tmp.path().join("first");
    let o = lamlab(&["solve", "--config", &cfg, "--out", first.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(first.join("n_1").is_dir() && !first.join("n_2").exists());
}

#[test]
fn config_errors_exit_4_with_pointer() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), r#","bogus":true"#);
    let o = lamlab(&["sequence", "--config", &cfg, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/bogus"));

    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":[8,4]}"#).unwrap();
    let o = lamlab(&["sequence", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/n/1"));

    let o = lamlab(&["sequence", "--config", tmp.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    let o = lamlab(&["sequence"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn solver_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), r#","solver":{"max_iterations":1}"#);
    let o = lamlab(&["sequence", "--config", &cfg, "--out", tmp.path().join("run").to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn export_writes_boundaries_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exp");
    let o = lamlab(&["export", "--preset", "point", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for n in [4, 8, 16, 32] {
        assert!(out.join(format!("n_{n}/boundary.csv")).is_file());
        assert!(out.join(format!("n_{n}/boundary.obj")).is_file());
        assert!(!out.join(format!("n_{n}/mesh.obj")).exists());
    }
}

#[test]
fn helicoid_preset_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("h");
    let o = lamlab(&["solve", "--preset", "helicoid", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("converged"), "{stdout}");
}
