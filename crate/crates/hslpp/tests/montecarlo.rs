use hslpp::config::ExperimentConfig;
use hslpp::core::lpp::GeomParams;
use hslpp::core::scaling::{h_top, kappa0};
use hslpp::montecarlo::{
    frame_kernel, frame_limit, run_bottom_experiment, run_convergence_study, run_intensity_experiment, run_profile,
    run_top_experiment, sample_ensemble, with_pool, ConvPoint, Frame,
};

fn small(n: usize, replicas: usize) -> ExperimentConfig {
    ExperimentConfig { n: vec![n], replicas, ..ExperimentConfig::default() }
}

#[test]
fn replicas_are_reproducible() {
    let g = GeomParams::new(0.5, 1.4).unwrap();
    let a = sample_ensemble(g, 30, 3, 7, 4).unwrap();
    let b = sample_ensemble(g, 30, 3, 7, 4).unwrap();
    let c = sample_ensemble(g, 30, 3, 7, 5).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = small(60, 40);
    let one = with_pool(Some(1), || run_top_experiment(&cfg).unwrap()).unwrap();
    let three = with_pool(Some(3), || run_top_experiment(&cfg).unwrap()).unwrap();
    assert_eq!(one.values, three.values);
    assert_eq!(one.summary, three.summary);
}

#[test]
fn top_experiment_reports_every_statistic() {
    let cfg = small(80, 30);
    let r = run_top_experiment(&cfg).unwrap();
    assert_eq!(r.values.len(), 30);
    let k0 = kappa0(0.5, 1.4);
    let v = r.summary.get("var_u(0.6)").unwrap();
    assert!((v.target.unwrap() - (0.6 - k0)).abs() < 1e-12);
    assert!((0.6 - k0 - 0.488889).abs() < 1e-6);
    assert!(r.summary.get("cov_u(0.2,0.8)").is_some());
    assert!(r.summary.stats.iter().all(|s| s.se >= 0.0 && s.estimate.is_finite()));
}

#[test]
fn profile_tracks_h_top() {
    let cfg = small(300, 30);
    let r = run_profile(&cfg, 0.8).unwrap();
    let s = r.summary.get("lambda1_over_n_vs_h_top").unwrap();
    assert!((s.target.unwrap() - h_top(0.5, 1.4, 0.8)).abs() < 1e-12);
    assert!((s.estimate - s.target.unwrap()).abs() < 4.0 * s.se + 0.02, "{s:?}");
    assert!(r.rows().count() > 0);
}

#[test]
fn bottom_experiment_orders_curves() {
    let cfg = ExperimentConfig { n: vec![60, 120], replicas: 30, kappa: Some(0.8), times: vec![0.0], ..ExperimentConfig::default() };
    let r = run_bottom_experiment(&cfg).unwrap();
    assert_eq!(r.summary.get("ordering_u1_ge_u2(N=60)").unwrap().estimate, 1.0);
    assert!(r.summary.get("ks_u1(t=0,N=60 vs N=120)").is_some());
}

#[test]
fn bottom_experiment_needs_kappa() {
    let e = run_bottom_experiment(&small(50, 5)).unwrap_err();
    assert!(e.to_string().contains("kappa"));
}

#[test]
fn symmetric_point_kernel_is_real() {
    for n in [100, 200] {
        let k = frame_kernel(0.5, 1.4, Frame::Bulk { kappa: 0.36 }, n, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(k.k12.im.abs() < 1e-8, "{:?}", k.k12);
    }
}

#[test]
fn edge_limit_is_brownian_kernel() {
    let k0 = kappa0(0.5, 1.4);
    let v = frame_limit(0.5, 1.4, Frame::Edge, 0.6, 0.0, 0.6, 0.0).unwrap();
    assert!((v - 1.0 / (2.0 * std::f64::consts::PI * (0.6 - k0)).sqrt()).abs() < 1e-12);
}

#[test]
fn convergence_study_rows() {
    let cfg = ExperimentConfig { n: vec![60, 120], ..ExperimentConfig::default() };
    let p = ConvPoint { frame: Frame::Edge, s: 0.4, x: 0.0, t: 0.6, y: 0.5 };
    let r = run_convergence_study(&cfg, &[p]).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert!(r.rows.iter().all(|row| row.err12.is_some_and(f64::is_finite)));
}

#[test]
fn intensity_small_run() {
    let cfg = small(40, 200);
    let s = run_intensity_experiment(&cfg, Frame::Edge, 0.6, &[0.0]).unwrap();
    let st = &s.stats[0];
    assert!(st.target.unwrap() > 0.0 && st.se > 0.0);
}
