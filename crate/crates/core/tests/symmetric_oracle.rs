use macroreal_core::dynamics::*;
use macroreal_core::spin::{make_coherent_state, SphericalAngle, SpinQuantumNumber, SymmetricEmbedding};

fn compare(full: &LindbladModel, dicke: &LindbladModel, n: usize, initial: &macroreal_core::DensityMatrix) {
    let emb = SymmetricEmbedding::new(n).unwrap();
    let times: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
    let rf = integrate_master(full, &emb.embed_density(initial).unwrap(), &times).unwrap();
    let rd = integrate_master(dicke, initial, &times).unwrap();
    for (k, (a, b)) in rf.states.iter().zip(&rd.states).enumerate() {
        let p = emb.project(a, 1e-8).unwrap();
        let d = p.rho.trace_distance(b);
        assert!(d < 1e-6, "n = {n}, t = {}: trace distance {d}", times[k]);
    }
    assert!(rf.diagnostics.trace_drift < 1e-8);
    assert!(rd.diagnostics.trace_drift < 1e-8);
}

#[test]
fn full_and_symmetric_integrations_agree() {
    for n in [2usize, 4, 6] {
        let omega = 1.0 / 16.0;
        let spin = SpinQuantumNumber::from_qubits(n).unwrap();
        let tilted = make_coherent_state(spin, SphericalAngle::new(0.8, 0.3).unwrap()).density();
        let builders: [(LindbladModel, LindbladModel); 2] = [
            (
                build_dephasing_model(n, omega, 1.0, Representation::Full, OperatorMode::Collective).unwrap(),
                build_dephasing_model(n, omega, 1.0, Representation::Dicke, OperatorMode::Collective).unwrap(),
            ),
            (
                build_thermal_model(n, omega, 0.1, 10.0, Representation::Full, OperatorMode::Collective).unwrap(),
                build_thermal_model(n, omega, 0.1, 10.0, Representation::Dicke, OperatorMode::Collective).unwrap(),
            ),
        ];
        for (full, dicke) in &builders {
            compare(full, dicke, n, &dicke.all_up());
            compare(full, dicke, n, &tilted);
        }
    }
}

#[test]
fn local_operators_leave_the_symmetric_subspace() {
    let n = 3;
    let emb = SymmetricEmbedding::new(n).unwrap();
    let local = build_thermal_model(n, 0.25, 0.1, 10.0, Representation::Full, OperatorMode::Local).unwrap();
    let rho0 = local.all_up();
    let res = integrate_master(&local, &rho0, &[0.0, 1.0]).unwrap();
    let err = emb.project(&res.states[1], 1e-6).unwrap_err();
    assert!(matches!(err, macroreal_core::Error::Leakage { .. }));
}
