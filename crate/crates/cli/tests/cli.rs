use std::process::{Command, Output};

fn fieldaoi(args: &[&str], out: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fieldaoi"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const MODEL: [&str; 10] = ["--a", "1", "--b", "1", "--lambda-s", "1", "--lambda-t", "2", "--mu-bar", "4"];

#[test]
fn analytic() {
    let dir = tempfile::tempdir().unwrap();
    let o = fieldaoi(&[&["analytic"], &MODEL[..]].concat(), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let eps: f64 = text.lines().next().unwrap().trim_start_matches("eps = ").parse().unwrap();
    assert!((eps - 0.68).abs() < 1e-12);
    assert!(dir.path().join("results.csv").exists());
}

#[test]
fn raw_channel_rate() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["analytic", "--a", "1", "--b", "1", "--lambda-s", "1", "--lambda-t", "2", "--mu", "400", "--length", "100"];
    let o = fieldaoi(&args, dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("eps = 0.6"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unstable = fieldaoi(&["analytic", "--a", "1", "--b", "1", "--lambda-s", "1", "--lambda-t", "8", "--mu-bar", "4"], dir.path());
    assert_eq!(unstable.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&unstable.stderr).contains("rho0"));

    let missing = fieldaoi(&["analytic", "--a", "1"], dir.path());
    assert_eq!(missing.status.code(), Some(2));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "kind = \"analytic\"\nnot_a_key = 3\n").unwrap();
    let o = fieldaoi(&["analytic", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not_a_key"));
}

#[test]
fn optimize_lcfs() {
    let dir = tempfile::tempdir().unwrap();
    let o = fieldaoi(&["optimize", "--a", "1", "--b", "1", "--mu-bar", "2", "--discipline", "lcfs"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("lambda_s* = 1\n"));
    assert!(text.contains("lambda_t* = unbounded"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "kind = \"analytic\"\n[model]\na = 1.0\nb = 1.0\nlambda_s = 1.0\nlambda_t = 2.0\nmu_bar = 8.0\n").unwrap();
    let o = fieldaoi(&["analytic", "--config", cfg.to_str().unwrap(), "--mu-bar", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("eps = 0.6799"));
}

#[test]
fn sweep_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--a", "1", "--b", "1", "--mu-bar", "4", "--lambda-s-range", "0.1:10:5", "--lambda-t-range", "0.1:10:4"];
    let o = fieldaoi(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let surface = std::fs::read_to_string(dir.path().join("surface.csv")).unwrap();
    assert_eq!(surface.lines().count(), 21);
    let bad = fieldaoi(&["sweep", "--lambda-s-range", "1:2"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn simulate_prints_seed_and_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let args = [&["simulate"], &MODEL[..], &["--seed", "5", "--horizon", "300", "--replications", "3", "--sim-length", "20", "--probes", "200"]].concat();
    let o = fieldaoi(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("eps_hat = "));
    assert!(text.contains("seed = 5"));
}

#[test]
fn equivalence_suite_exit_code_tracks_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = fieldaoi(&["check", "--suite", "appendix-a", "--seed", "1", "--horizon", "5000", "--replications", "10"], dir.path());
    let table = std::fs::read_to_string(dir.path().join("check.csv")).unwrap();
    assert_eq!(table.lines().count(), 6);
    // The suite is statistical: each line is a 95% test, so the exit code
    // must track the table rather than be assumed.
    let all_pass = table.lines().skip(1).all(|l| l.split(',').nth(1) == Some("pass"));
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 4 }), "{}", stdout(&o));
}
