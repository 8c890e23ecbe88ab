use hrwave::harness::{
    read_csv, run_convergence, write_csv, ExperimentSpec, ProblemSpec, ReferenceSpec,
};
use hrwave::integrate::{run, Method, RunOptions, SchemeConfig};
use hrwave::model::{InitialData, InitialProfile, Nonlinearity};
use hrwave::spectral::snapshot::{read_snapshot, write_snapshot};

#[test]
fn errors_decrease_along_sweep() {
    let spec = ExperimentSpec {
        problem: ProblemSpec {
            dim: 1,
            nonlinearity: Nonlinearity::sine(40.0, 1.0).unwrap(),
            initial: InitialData::sine_gordon_1d(),
            t_final: 0.25,
        },
        sweep: vec![32, 64, 128, 256, 512],
        tau_ratio: 0.25,
        methods: vec![Method::HrLri { alpha: 2.0 }],
        reference: ReferenceSpec::new(1 << 12),
        seed: None,
        threads: 0,
    };
    let records = run_convergence(&spec).unwrap();
    assert_eq!(records.len(), 5);
    for pair in records.windows(2) {
        assert!(
            pair[1].err0 < pair[0].err0,
            "{} -> {}",
            pair[0].err0,
            pair[1].err0
        );
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    write_csv(&path, &records).unwrap();
    assert_eq!(read_csv(&path).unwrap(), records);
}

#[test]
fn snapshot_restart_matches_single_run() {
    let nl = Nonlinearity::sine(1.0, 1.0).unwrap();
    let data = InitialData::smooth_sin(2);
    let cfg = |t_final| SchemeConfig {
        method: Method::Strang,
        n: 8,
        tau: 1.0 / 64.0,
        t_final,
        nonlinearity: nl,
    };
    let profile = InitialProfile::prepare(&data, 8).unwrap();
    let whole = run(&cfg(0.5), &profile, &RunOptions::default())
        .unwrap()
        .solution()
        .unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("half.hrwv");
    let half = run(&cfg(0.25), &profile, &RunOptions::default()).unwrap();
    write_snapshot(&path, 0.25, &half.solution().unwrap()).unwrap();
    let (t, field) = read_snapshot(&path).unwrap();
    assert_eq!(t, 0.25);
    let resumed = InitialProfile::prepare(&InitialData::Coefficients(field), 8).unwrap();
    let second = run(&cfg(0.25), &resumed, &RunOptions::default())
        .unwrap()
        .solution()
        .unwrap();
    let diff = second.sub(&whole).unwrap().max_abs();
    assert!(diff < 1e-13, "{diff}");
}
