use occam::experiments::{self, ExperimentKind, ExperimentSpec, Setting};
use occam::fit::threshold_binary;
use occam::{exnvi, fit, generate, membership_error, OccamOptions};

fn setting(n: usize, rho: f64, profile: &str) -> Setting {
    Setting {
        n,
        rho,
        profile: profile.into(),
        ..Setting::default()
    }
}

#[test]
fn sample_then_fit() {
    let config = setting(300, 0.1, "A").sampler_config(21).unwrap();
    let net = generate(&config).unwrap();
    let result = fit(&net.adjacency, 3, &OccamOptions::default()).unwrap();
    let truth = threshold_binary(&net.params.z, 1.0 / 3.0);
    assert!(exnvi(&truth, &result.binary).unwrap().value > 0.9);
    assert!(membership_error(&result.z_hat, &net.params.z).unwrap() < 0.2);
}

#[test]
fn separable_communities_are_recovered() {
    let mut spec = ExperimentSpec::new(ExperimentKind::RhoSweep, setting(500, 0.0, "pure"));
    spec.grid = vec![0.0];
    spec.replications = 20;
    spec.master_seed = 3;
    let rows = experiments::run_rho_sweep(&spec).unwrap();
    let summary = experiments::summarize(&rows);
    assert_eq!(summary[0].failed_rows, 0);
    assert!(summary[0].mean_exnvi >= 0.99, "{}", summary[0].mean_exnvi);
}

#[test]
fn rows_are_bounded_and_counted() {
    let mut spec = ExperimentSpec::new(ExperimentKind::NTrend, setting(0, 0.1, "B"));
    spec.grid = vec![100.0, 150.0, 200.0];
    spec.replications = 3;
    spec.base.degree = 20.0;
    let rows = experiments::run_n_trend(&spec).unwrap();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        assert!(row.status.is_ok());
        assert!((0.0..=1.0).contains(&row.exnvi));
        assert!(row.membership_error >= 0.0);
    }
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let mut spec = ExperimentSpec::new(ExperimentKind::CtauSweep, setting(120, 0.1, "A"));
    spec.grid = vec![0.5, 8.0];
    spec.replications = 3;
    spec.base.degree = 20.0;
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| experiments::rows_to_csv_string(&experiments::run_ctau_sweep(&spec).unwrap(), false))
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn named_presets() {
    let spec = experiments::preset("fig2-A-d40-nohub").unwrap();
    assert_eq!(spec.grid.len(), 11);
    assert_eq!(spec.replications, 200);
    let spec = experiments::preset("fig1-n2000-hub-d20-rho0.25").unwrap();
    assert_eq!(spec.grid.len(), 13);
    assert_eq!(spec.base.n, 2000);
    assert!(experiments::preset("fig3").is_err());
}
