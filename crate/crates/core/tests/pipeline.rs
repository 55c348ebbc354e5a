use rbswipt_core::beam_power::{small_signal_gain, threshold_gain};
use rbswipt_core::diffraction::fox_li_solve;
use rbswipt_core::pipeline::{
    evaluate_mode, read_results, records_to_csv, run_sweep_with_cache, write_results, ModeCache, ResultFormat,
};
use rbswipt_core::receiver::spectral_efficiency;
use rbswipt_core::{run_point, run_sweep, Config, SweepSpec};

#[test]
fn low_loss_point() {
    let rec = run_point(&Config::default(), 1.0, 5e-3, 0.3).unwrap();
    assert!((rec.delta / 0.0021 - 1.0).abs() < 0.3, "delta {}", rec.delta);
    assert!(rec.lasing);
    assert!(rec.p_out_w > 0.0 && rec.p_e_w > 0.0 && rec.c_nats > 0.0);
    assert!((rec.eta_e2e - rec.p_out_w / 143.0).abs() < 1e-15);
    assert_eq!(rec.delta + rec.epsilon, 1.0);
}

#[test]
fn high_loss_point_threshold() {
    let config = Config::default();
    let geom = config.geometry_at(5.0, 1e-3);
    let mode = fox_li_solve(&geom, &config.grid_for(&geom), &config.fox_li()).unwrap();
    let eps = 1.0 - mode.one_pass_loss;

    // The reflector-sized medium has a large small-signal gain, so this cavity lases.
    let gain = config.gain_for(&geom);
    let loss = threshold_gain(&config.coupler(), &gain, eps, eps);
    let g0l = small_signal_gain(&config.pump(), &gain);
    let rec = evaluate_mode(&config, &geom, &mode, 0.5).unwrap();
    assert_eq!(rec.lasing, g0l > loss);
    assert!(rec.lasing);

    // A 5 mm medium spreads the same pump thin enough to stay below threshold.
    let mut wide = config.clone();
    wide.gain.medium_cross_section_cm2 = Some(0.7854);
    let gain = wide.gain_for(&geom);
    assert!(small_signal_gain(&wide.pump(), &gain) < threshold_gain(&wide.coupler(), &gain, eps, eps));
    let rec = evaluate_mode(&wide, &geom, &mode, 0.5).unwrap();
    assert!(!rec.lasing);
    assert_eq!(rec.p_out_w, 0.0);
    assert_eq!(rec.p_e_w, 0.0);
    assert_eq!(rec.c_nats, 0.0);
}

#[test]
fn splitter_extremes() {
    let mut config = Config::default();
    config.grid.samples_per_side = 128;
    let geom = config.geometry_at(3.0, 2e-3);
    let mode = fox_li_solve(&geom, &config.grid_for(&geom), &config.fox_li()).unwrap();
    let all_info = evaluate_mode(&config, &geom, &mode, 0.0).unwrap();
    assert_eq!(all_info.p_e_w, 0.0);
    let full = spectral_efficiency(all_info.p_out_w, &config.apd()).unwrap();
    assert_eq!(all_info.c_nats, full.spectral_efficiency);

    let all_power = evaluate_mode(&config, &geom, &mode, 1.0).unwrap();
    assert_eq!(all_power.c_nats, 0.0);
    assert!(all_power.p_e_w > 0.0);
}

#[test]
fn loss_increases_with_length_at_three_mm() {
    let spec = SweepSpec {
        lengths_m: vec![1.0, 2.0, 3.0, 4.0, 5.0],
        radii_m: vec![3e-3],
        gammas: vec![0.5],
    };
    let cache = ModeCache::new();
    let records = run_sweep_with_cache(&spec, &Config::default(), &cache).unwrap();
    assert_eq!(cache.solve_count(), 5);
    assert!(records.iter().all(|r| r.is_ok()));
    assert!(records.windows(2).all(|w| w[1].delta > w[0].delta));
    let fresh = run_point(&Config::default(), 3.0, 3e-3, 0.5).unwrap();
    assert_eq!(records[2], fresh);
}

#[test]
fn results_files() {
    let mut config = Config::default();
    config.grid.samples_per_side = 64;
    let spec = SweepSpec {
        lengths_m: vec![2.0, 3.0],
        radii_m: vec![1e-3],
        gammas: vec![0.1, 0.5, 0.9],
    };
    let records = run_sweep(&spec, &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (format, name) in [(ResultFormat::Csv, "r.csv"), (ResultFormat::Json, "r.json")] {
        let path = dir.path().join(name);
        write_results(&records, format, &path).unwrap();
        assert_eq!(read_results(format, &path).unwrap(), records);
    }
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);

    let empty = dir.path().join("empty.csv");
    write_results(&[], ResultFormat::Csv, &empty).unwrap();
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), records_to_csv(&[]).unwrap());
    assert_eq!(std::fs::read_to_string(&empty).unwrap().lines().count(), 1);

    let missing = dir.path().join("no/such/dir.csv");
    assert!(matches!(
        write_results(&records, ResultFormat::Csv, &missing),
        Err(rbswipt_core::Error::Io { .. })
    ));
}
