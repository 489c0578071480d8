use macroreal_core::dynamics::*;
use macroreal_core::spin::{build_nonclassical_hamiltonian, SpinQuantumNumber};

/// Single-qubit frequency of the N = 10 scenarios.
const OMEGA: f64 = 1.0 / 16.0;

#[test]
fn toy_decay_rate_matches_small_step_law() {
    let omega_dt = 0.2;
    let p = ToyModelParams::new(1.0, omega_dt, 0).unwrap();
    let small_step = p.approximate_rate();
    let steps = (5.0 / small_step / omega_dt).ceil() as usize;
    let p = ToyModelParams::new(1.0, omega_dt, steps).unwrap();
    let series = toy_survival_series(SpinQuantumNumber::new(5.0).unwrap(), &p).unwrap();
    let fit = fit_decay_rate(&series).unwrap();
    assert!((fit.nu - small_step).abs() / small_step < 0.05, "{} vs {small_step}", fit.nu);
    assert!((fit.nu - p.exact_rate()).abs() < 1e-9);
    assert!(fit.max_abs_error < 0.01);
}

#[test]
fn closed_survival_is_cos_squared() {
    let spin = SpinQuantumNumber::new(5.0).unwrap();
    let model = LindbladModel::custom(build_nonclassical_hamiltonian(spin, 1.0).unwrap(), vec![]).unwrap();
    let times: Vec<f64> = (0..=40).map(|k| 0.1 * k as f64).collect();
    let res = integrate_master(&model, &model.all_up(), &times).unwrap();
    for (t, r) in times.iter().zip(&res.states) {
        assert!((r.population(0) - t.cos().powi(2)).abs() < 1e-9, "t = {t}");
    }
}

#[test]
fn dephasing_confines_population_to_the_poles() {
    let model = build_dephasing_model(10, OMEGA, 1.0, Representation::Dicke, OperatorMode::Collective).unwrap();
    let spin = model.spin();
    let edges = BinEdges::unit(spin);
    let n = 3000;
    let times: Vec<f64> = (0..=n).map(|k| 15.0 * k as f64 / n as f64).collect();
    let mut worst: f64 = 0.0;
    let mut south_15 = 0.0;
    let diag = integrate_master_observed(&model, &model.all_up(), &times, &MasterOptions::default(), |k, _, r| {
        let h = magnetization_distribution(r, &edges)?;
        worst = worst.max(h.intermediate_mass(spin));
        if k == n {
            south_15 = h.probabilities[0];
        }
        Ok(())
    })
    .unwrap();
    assert!(worst < 1e-3);
    assert!((south_15 - 0.5).abs() < 1e-3);
    assert!(diag.trace_drift < 1e-8 && diag.min_eigenvalue > -1e-6);
}

#[test]
fn thermal_spreads_through_intermediate_bins() {
    let model = build_thermal_model(10, OMEGA, 0.1, 10.0, Representation::Dicke, OperatorMode::Collective).unwrap();
    let res = integrate_master(&model, &model.all_up(), &[0.0, 1.0]).unwrap();
    let h = magnetization_distribution(&res.states[1], &BinEdges::unit(model.spin())).unwrap();
    assert!(h.intermediate_mass(model.spin()) >= 0.05);
}

#[test]
fn dephasing_survival_decays_exponentially() {
    // Strong dephasing leaves an incoherent pole exchange at rate 4ω_eff²/Γ,
    // Γ = ½(L_N − L_S)².
    let model = build_dephasing_model(10, OMEGA, 1.0, Representation::Dicke, OperatorMode::Collective).unwrap();
    let omega_eff = 512.0 * OMEGA;
    let gamma = 0.5 * 40.0f64.powi(2);
    let expected = 4.0 * omega_eff * omega_eff / gamma;
    let times: Vec<f64> = (1..=20).map(|k| 0.02 * k as f64).collect();
    let mut grid = vec![0.0];
    grid.extend(&times);
    let res = integrate_master(&model, &model.all_up(), &grid).unwrap();
    let series = SurvivalSeries::new(times, res.states[1..].iter().map(|r| r.population(0)).collect()).unwrap();
    let fit = fit_decay_rate(&series).unwrap();
    assert!((fit.nu - expected).abs() / expected < 0.02, "{} vs {expected}", fit.nu);
}
