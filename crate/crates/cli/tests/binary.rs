use std::path::Path;
use std::process::{Command, Output};

fn qexpander(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qexpander")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn sd_exact_values() {
    let o = qexpander(&["sd", "eval", "tr(U1 U1) tr(U1' U1')", "--exact"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "value = 2\nexact = 2/1\n");
    let o = qexpander(&["sd", "eval", "tr(U1 U1') tr(U2 U2')", "--n", "8"]);
    assert_eq!(stdout(&o), "value = 64\nexact = N^2/1\n");
}

#[test]
fn sd_series_prints_levels() {
    let o = qexpander(&["sd", "eval", "tr(U1 U1) tr(U1' U1')", "--series", "--levels", "3", "--tol", "0"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("value = 2\n"), "{text}");
    assert!(text.contains("level 2 = 0/1 = 0\n"));
}

#[test]
fn validation_errors_exit_with_two() {
    for args in [
        &["sd", "eval", "tr(U1"][..],
        &["sd", "eval", "tr(U1 U1 U1) tr(U1' U1' U1')", "--series", "--n", "4"],
        &["spectrum", "--n", "4", "--d", "3"],
        &["cayley", "--d", "1"],
        &["sweep", "--n-list", "65"],
        &["edge", "--n", "4", "--construction", "nonhermitian"],
        &["no-such-command"],
    ] {
        let o = qexpander(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn numerical_failures_exit_with_three() {
    let o = qexpander(&["sd", "eval", "tr(U1 U2 U1 U2) tr(U2' U1' U2' U1')", "--series", "--node-budget", "1"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "D=4\nN_list=4,x\n").unwrap();
    let o = qexpander(&["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = qexpander(&["--config", "/nonexistent/x.cfg", "sweep"]);
    assert_eq!(code(&o), 2);
}

fn sweep(dir: &Path, cfg: &Path) -> String {
    let o = qexpander(&["--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "sweep"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(dir.join("sweep.csv")).unwrap()
}

#[test]
fn sweep_is_deterministic_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "construction=weighted\nN_list=4,6\nD=4\ntrials=2\nmaster_seed=11\ntiming=false\n").unwrap();
    let a = sweep(&dir.path().join("a"), &cfg);
    let b = sweep(&dir.path().join("b"), &cfg);
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "N,D,seed,construction,lambda2,lambda_H,lambda_nH,alon_boppana_lb,gap_ok,wall_ms");
    assert_eq!(lines.len(), 5);
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 10);
        assert_eq!(cols[3], "weighted");
        assert_eq!(cols[8], "true");
        assert_eq!(cols[9], "");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N_list=4\nmaster_seed=1\ntiming=false\n").unwrap();
    let out = dir.path().join("o");
    let o = qexpander(&[
        "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "5",
        "sweep", "--n-list", "3", "--construction", "nonhermitian", "--d", "3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[0], row[1], row[3]), ("3", "3", "nonhermitian"));
    assert_eq!((row[7], row[8]), ("", ""));
}

#[test]
fn spectrum_reproduces_sweep_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N_list=5\nmaster_seed=3\ntiming=false\n").unwrap();
    let csv = sweep(&dir.path().join("s"), &cfg);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let o = qexpander(&["spectrum", "--n", "5", "--seed", row[2]]);
    let lambda2: f64 = String::from_utf8_lossy(&o.stderr).trim().strip_prefix("lambda2 = ").unwrap().parse().unwrap();
    assert_eq!(format!("{lambda2:.12}"), row[4]);
}

#[test]
fn channel_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("ch.json");
    let a = qexpander(&["spectrum", "--n", "4", "--seed", "9", "--save-channel", json.to_str().unwrap()]);
    assert_eq!(code(&a), 0);
    let b = qexpander(&["spectrum", "--channel", json.to_str().unwrap()]);
    assert_eq!(code(&b), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rank,a_over_N2,eig_re,eig_im,eig_abs");
    assert_eq!(lines.len(), 17);

    std::fs::write(&json, "{\"dim\": 2}").unwrap();
    assert_eq!(code(&qexpander(&["spectrum", "--channel", json.to_str().unwrap()])), 2);
}

#[test]
fn cayley_and_moments_csv() {
    let o = qexpander(&["cayley", "--d", "6", "--m-max", "2"]);
    assert_eq!(stdout(&o), "D,m,l,count\n6,0,0,1\n6,1,1,6\n6,2,0,6\n6,2,2,30\n");
    let o = qexpander(&["moments", "--n", "4", "--m", "1,2"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,moment_trace,lambda2_estimate,frobenius_moment,frobenius_floor");
    assert!(lines[1].starts_with("1,,,"));
    assert!(lines[2].starts_with("2,"));
}

#[test]
fn edge_report_is_json() {
    let o = qexpander(&["edge", "--n", "6", "--projectors", "20", "--seed", "4"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["min_slack"].as_f64().unwrap() >= -1e-8);
    assert_eq!(v["chain"]["holds"], serde_json::Value::Bool(true));
    assert!(v["chain"]["trace_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn collapse_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = qexpander(&["--out", dir.path().to_str().unwrap(), "collapse", "--n-list", "4,6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("quantile distance N=4 vs N=6: "));
    let csv = std::fs::read_to_string(dir.path().join("collapse.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 16 + 36);
    assert!(dir.path().join("collapse.svg").exists());
}
