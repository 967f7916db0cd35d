use otoc_sim::experiments::{
    load_report, prepare_state, run_spreading, run_state_comparison, run_synthesis_check, run_trotter_tradeoff,
    verify_manifest, RunConfig, StateRecipe, TimeGrid,
};
use otoc_sim::{expect_pauli, Error, OtocSeries, PauliLetter, PauliString};

fn small(dir: &std::path::Path) -> RunConfig {
    RunConfig {
        n: 5,
        i: 3,
        dt: 0.01,
        times: Some(TimeGrid { start: 0.0, stop: 0.6, step: 0.05 }),
        out: dir.to_path_buf(),
        ..RunConfig::default()
    }
}

#[test]
fn recipe_examples() {
    let up = prepare_state(&StateRecipe::AllUp, 2, 0).unwrap();
    assert_eq!(up.amplitudes().iter().map(|a| a.re).collect::<Vec<_>>(), vec![1.0, 0.0, 0.0, 0.0]);
    let ground = prepare_state(&StateRecipe::GroundStateIntegrable, 2, 0).unwrap();
    assert!((ground.amplitudes()[3].norm() - 1.0).abs() < 1e-12);
    let ghz = prepare_state(&StateRecipe::Ghz, 3, 0).unwrap();
    assert!((ghz.amplitudes()[0].re - 0.5f64.sqrt()).abs() < 1e-15 && (ghz.amplitudes()[7].re - 0.5f64.sqrt()).abs() < 1e-15);
    for seed in 0..8 {
        let y = prepare_state(&StateRecipe::RandomPmY { samples: 1 }, 1, seed).unwrap();
        let v = expect_pauli(&y, &PauliString::single(1, 1, PauliLetter::Y, 1.0).unwrap()).unwrap().value;
        assert!((v.abs() - 1.0).abs() < 1e-12);
    }
    let a = prepare_state(&StateRecipe::RandomPmY { samples: 1 }, 6, 3).unwrap();
    let b = prepare_state(&StateRecipe::RandomPmY { samples: 1 }, 6, 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn spreading_manifest_and_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spreading(&small(dir.path())).unwrap();
    assert!(out.report.all_passed());
    let report = load_report(dir.path()).unwrap();
    verify_manifest(dir.path(), &report).unwrap();
    let series: Vec<_> = report.files.iter().filter(|f| f.kind == "otoc-series").collect();
    assert_eq!(series.len(), 2 * 4);
    for f in series {
        let points = OtocSeries::read_csv(&dir.path().join(&f.path)).unwrap();
        assert_eq!(points.len(), 13);
        for p in points {
            p.check_range().unwrap();
        }
    }
    assert_eq!(report.regimes[0].hx, 0.0);
    assert_eq!(report.regimes[1].hx, 1.0);
}

#[test]
fn states_errors_are_small_and_ghz_starts_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig { j: Some(vec![1]), dt: 0.001, tolerance: Some(1e-10), ..small(dir.path()) };
    let out = run_state_comparison(&config).unwrap();
    assert!(out.report.all_passed(), "{:?}", out.report.failed());
    let ghz = out.curves.iter().find(|c| c.recipe == StateRecipe::Ghz).unwrap();
    assert_eq!(ghz.error[0], 0.0);
    assert!(ghz.c_circuit[0].abs() < 1e-12);
    verify_manifest(dir.path(), &out.report).unwrap();
}

#[test]
fn tradeoff_depths_and_alignment() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig { n: 4, i: 2, j: Some(vec![3]), times: Some(TimeGrid { start: 0.0, stop: 0.5, step: 0.1 }), ..small(dir.path()) };
    let out = run_trotter_tradeoff(&config).unwrap();
    assert!(out.report.all_passed(), "{:?}", out.report.failed());
    assert_eq!(out.curves.len(), 5);
    let depth = |name: &str| out.summary.iter().find(|s| s.name == name).unwrap().step.unwrap().depth;
    assert!(depth("o1_dt0.01_hzhx") < depth("o4_dt0.001_hzhx"));
    verify_manifest(dir.path(), &out.report).unwrap();
}

#[test]
fn synthesis_check_report() {
    let dir = tempfile::tempdir().unwrap();
    let (report, rows) = run_synthesis_check(&small(dir.path())).unwrap();
    assert!(report.all_passed());
    assert_eq!(rows.len(), 3 * (3 + 15 + 63) + 400);
    verify_manifest(dir.path(), &report).unwrap();
}

#[test]
fn invalid_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let base = small(dir.path());
    for bad in [
        RunConfig { n: 1, ..base.clone() },
        RunConfig { i: 6, ..base.clone() },
        RunConfig { j: Some(vec![0]), ..base.clone() },
        RunConfig { dt: -0.1, ..base.clone() },
        RunConfig { states: vec![], ..base.clone() },
        RunConfig { times: Some(TimeGrid { start: 0.0, stop: 1.0, step: 0.0 }), ..base.clone() },
    ] {
        assert!(matches!(run_spreading(&bad), Err(Error::Config(_))), "{bad:?}");
    }
    let many = RunConfig { j: Some(vec![1, 2]), ..base };
    assert!(matches!(run_state_comparison(&many), Err(Error::Config(_))));
}
