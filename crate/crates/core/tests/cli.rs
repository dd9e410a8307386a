use std::process::{Command, Output};

fn fdsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdsec")).args(args).output().expect("run fdsec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_is_deterministic_and_logs_banner() {
    let a = fdsec(&["solve", "--seed", "5"]);
    let b = fdsec(&["solve", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("sum_secrecy_rate"));
    assert!(stdout(&a).contains("slack t_u"));
    let banner = stderr(&a);
    assert!(banner.contains("seed 5"));
    assert!(banner.contains("e_min = 0.001"));
}

#[test]
fn infeasible_energy_requirement_exits_2() {
    let o = fdsec(&["solve", "--set", "e_min=1.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("infeasible"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(fdsec(&["solve", "--set", "bogus=1"]).status.code(), Some(64));
    assert_eq!(fdsec(&["solve", "--set", "zeta=2"]).status.code(), Some(64));
    assert_eq!(fdsec(&["launch"]).status.code(), Some(64));
    assert_eq!(fdsec(&["sweep", "--param", "snr"]).status.code(), Some(64));
    assert_eq!(fdsec(&["solve", "--config", "/nonexistent/fdsec.toml"]).status.code(), Some(1));
}

#[test]
fn config_file_and_override_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "seed = 9\ne_min = 2e-3\n").unwrap();
    let p = path.to_str().unwrap();
    let o = fdsec(&["solve", "--config", p, "--set", "e_min=5e-4"]);
    let banner = stderr(&o);
    assert!(banner.contains("seed 9"), "{banner}");
    assert!(banner.contains("e_min = 0.0005"), "{banner}");
}

#[test]
fn trace_rows_match_iterations_and_are_nondecreasing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let o = fdsec(&["trace", "--seed", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(!rows.is_empty());
    let printed = stdout(&o).lines().filter(|l| !l.starts_with('#')).count() - 2;
    assert_eq!(printed, rows.len());
    for w in rows.windows(2) {
        assert!(w[1][1] >= w[0][1] - 1e-7);
    }
    let solve = stdout(&fdsec(&["solve", "--seed", "2"]));
    let iters: usize = solve
        .lines()
        .find_map(|l| l.strip_prefix("iterations"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert_eq!(iters, rows.len());
}

#[test]
fn sweep_writes_csv_with_requested_parameter() {
    let dir = tempfile::tempdir().unwrap();
    for param in ["sigma_si2_db", "e_min_w"] {
        let path = dir.path().join(format!("{param}.csv"));
        let o = fdsec(&["sweep", "--param", param, "--trials", "1", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("param,value,scheme"), "{text}");
        assert!(text.lines().skip(1).all(|l| l.starts_with(param)));
        assert!(stdout(&o).contains("full-duplex"));
    }
}

#[test]
fn sweep_to_unwritable_path_fails() {
    let o = fdsec(&["sweep", "--trials", "1", "--set", "grid=[-60]", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_passes_and_catches_injected_fault() {
    let ok = fdsec(&["selftest"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert_eq!(stdout(&ok).lines().filter(|l| l.starts_with("PASS")).count(), 4);
    let bad = fdsec(&["selftest", "--inject-fault"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).lines().any(|l| l.starts_with("FAIL") && l.contains("tangent-bounds")));
}
