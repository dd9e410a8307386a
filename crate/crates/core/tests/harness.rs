use fd_secrecy::baselines::Scheme;
use fd_secrecy::harness::{self, read_csv, write_csv, Outcome, SweepParam, SweepSpec, CSV_HEADER};
use fd_secrecy::model::SystemConfig;
use fd_secrecy::spca::SpcaOptions;

fn small_spec(param: SweepParam) -> SweepSpec {
    SweepSpec {
        param,
        grid: param.default_grid().into_iter().take(2).collect(),
        trials: 3,
        schemes: Scheme::ALL.to_vec(),
        base: SystemConfig::default(),
        seed: 17,
        threads: Some(1),
        spca: SpcaOptions::default(),
    }
}

#[test]
fn csv_round_trip_preserves_points() {
    let res = harness::sweep(&small_spec(SweepParam::SigmaSi2Db)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    write_csv(&res, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 1 + 2 * Scheme::ALL.len());
    let back = read_csv(&path).unwrap();
    assert_eq!(back.param, res.param);
    assert_eq!(back.points.len(), res.points.len());
    for (a, b) in back.points.iter().zip(&res.points) {
        assert_eq!(a.scheme, b.scheme);
        assert_eq!((a.n_ok, a.n_infeasible, a.n_failed), (b.n_ok, b.n_infeasible, b.n_failed));
        assert!((a.value - b.value).abs() <= 1e-9 * b.value.abs());
        assert!(a.mean_rate.is_nan() && b.mean_rate.is_nan() || (a.mean_rate - b.mean_rate).abs() <= 1e-9 * b.mean_rate.abs().max(1.0));
    }
}

#[test]
fn trial_counts_add_up() {
    let spec = small_spec(SweepParam::EMinW);
    let res = harness::sweep(&spec).unwrap();
    for p in &res.points {
        assert_eq!(p.n_ok + p.n_infeasible + p.n_failed, spec.trials);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let mut spec = small_spec(SweepParam::SigmaSi2Db);
    let a = harness::sweep(&spec).unwrap();
    spec.threads = Some(2);
    let b = harness::sweep(&spec).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn infeasible_instances_are_reported_for_every_scheme() {
    let cfg = SystemConfig {
        e_min: 1.0,
        ..SystemConfig::default()
    };
    let ch = harness::gen_channels(&cfg, 1);
    let outs = harness::run_instance(&ch, &cfg, &Scheme::ALL, &SpcaOptions::default());
    assert_eq!(outs.len(), 3);
    assert!(outs.iter().all(|(_, o)| *o == Outcome::Infeasible));
}

#[test]
fn bad_specs_are_rejected() {
    let mut spec = small_spec(SweepParam::SigmaSi2Db);
    spec.trials = 0;
    assert!(harness::sweep(&spec).is_err());
    let mut spec = small_spec(SweepParam::EMinW);
    spec.grid = vec![-1.0];
    assert!(harness::sweep(&spec).is_err());
}

#[test]
fn unreadable_csv_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "a,b\n1,2\n").unwrap();
    assert!(read_csv(&path).is_err());
}
