use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::spin::DensityMatrix;

use super::lindblad::{LindbladModel, LindbladRhs};
use super::rk::{self, StepControl};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterOptions {
    pub step: StepControl,
    /// Abort when the smallest eigenvalue of a stored state drops below this.
    pub positivity_floor: f64,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self { step: StepControl::default(), positivity_floor: -1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterDiagnostics {
    /// `max_t |Tr ρ(t) − 1|`.
    pub trace_drift: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub last_step: f64,
    pub min_step: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: MasterDiagnostics,
}

impl EvolutionResult {
    pub fn expectations(&self, op: &CMat) -> Vec<f64> {
        self.states.iter().map(|r| r.expectation(op)).collect()
    }
}

pub fn integrate_master(model: &LindbladModel, rho0: &DensityMatrix, times: &[f64]) -> Result<EvolutionResult> {
    integrate_master_with(model, rho0, times, &MasterOptions::default())
}

pub fn integrate_master_with(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &MasterOptions,
) -> Result<EvolutionResult> {
    let mut states = Vec::with_capacity(times.len());
    let diagnostics = integrate_master_observed(model, rho0, times, opts, |_, _, rho| {
        states.push(rho.clone());
        Ok(())
    })?;
    Ok(EvolutionResult { times: times.to_vec(), states, diagnostics })
}

/// Streams `ρ(t_k)` to `observe` instead of storing it; intended for long,
/// finely sampled runs.
pub fn integrate_master_observed<O>(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &MasterOptions,
    mut observe: O,
) -> Result<MasterDiagnostics>
where
    O: FnMut(usize, f64, &DensityMatrix) -> Result<()>,
{
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: rho0.dim() });
    }
    let rhs = LindbladRhs::new(model);
    let mut diag = MasterDiagnostics {
        trace_drift: 0.0,
        hermiticity: 0.0,
        min_eigenvalue: f64::INFINITY,
        accepted_steps: 0,
        rejected_steps: 0,
        last_step: 0.0,
        min_step: 0.0,
    };
    let stats = rk::integrate(
        |r| rhs.eval(r),
        rho0.matrix().clone(),
        times,
        &opts.step,
        |k, t, r, st| {
            diag.trace_drift = diag.trace_drift.max((linalg::trace(r) - 1.0).norm());
            diag.hermiticity = diag.hermiticity.max(linalg::hermiticity_deviation(r));
            let lam = linalg::min_eigenvalue(r);
            diag.min_eigenvalue = diag.min_eigenvalue.min(lam);
            if lam < opts.positivity_floor {
                return Err(Error::Positivity { time: t, min_eigenvalue: lam, step_size: st.last_step });
            }
            observe(k, t, &DensityMatrix::from_trusted(r.clone()))
        },
    );
    let stats = stats?;
    diag.accepted_steps = stats.accepted;
    diag.rejected_steps = stats.rejected;
    diag.last_step = stats.last_step;
    diag.min_step = stats.min_step;
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::lindblad::{build_closed_model, build_dephasing_model, OperatorMode, Representation};
    use crate::linalg::c;
    use crate::spin::{make_coherent_state, nonclassical_propagator, SpinQuantumNumber, SphericalAngle};
    use crate::spin::{build_nonclassical_hamiltonian, CollectiveOperator, OperatorLabel};

    #[test]
    fn closed_limit_matches_propagator() {
        let spin = SpinQuantumNumber::new(2.0).unwrap();
        let model = LindbladModel::custom(build_nonclassical_hamiltonian(spin, 1.3).unwrap(), vec![]).unwrap();
        let psi = make_coherent_state(spin, SphericalAngle::new(0.7, 1.1).unwrap());
        let rho0 = psi.density();
        let times: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
        let res = integrate_master(&model, &rho0, &times).unwrap();
        for (t, r) in times.iter().zip(&res.states) {
            let u = nonclassical_propagator(spin, 1.3, *t);
            let exact = &u * rho0.matrix() * u.adjoint();
            assert!(linalg::max_abs_diff(r.matrix(), &exact) < 1e-9, "t = {t}");
        }
        assert!(res.diagnostics.trace_drift < 1e-10);
    }

    #[test]
    fn pure_dephasing_closed_form() {
        // H = 0 and diagonal L = diag(l): ρ_ab decays at ½|l_a − l_b|².
        let spin = SpinQuantumNumber::new(1.5).unwrap();
        let h = CollectiveOperator::new(CMat::zeros(4, 4), OperatorLabel::Hamiltonian).unwrap();
        let l = [0.3, -0.2, 1.1, 0.5];
        let lop = CMat::from_diagonal(&l.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>().into());
        let model = LindbladModel::custom(h, vec![lop]).unwrap();
        let rho0 = make_coherent_state(spin, SphericalAngle::new(1.2, 0.4).unwrap()).density();
        let times = [0.0, 0.5, 1.0, 2.0];
        let res = integrate_master(&model, &rho0, &times).unwrap();
        for (t, r) in times.iter().zip(&res.states) {
            for a in 0..4 {
                for b in 0..4 {
                    let rate = 0.5 * (l[a] - l[b]).powi(2);
                    let exact = rho0.matrix()[(a, b)] * (-rate * t).exp();
                    assert!((r.matrix()[(a, b)] - exact).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn closed_model_swaps_poles() {
        let model = build_closed_model(4, 1.0, Representation::Dicke).unwrap();
        // ω_eff = 8; a quarter period is π/16.
        let t = std::f64::consts::PI / 16.0;
        let res = integrate_master(&model, &model.all_up(), &[0.0, t]).unwrap();
        assert!((res.states[1].population(4) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dephasing_keeps_trace_and_positivity() {
        let model = build_dephasing_model(4, 1.0, 1.0, Representation::Dicke, OperatorMode::Collective).unwrap();
        let times: Vec<f64> = (0..=40).map(|k| 0.05 * k as f64).collect();
        let res = integrate_master(&model, &model.all_up(), &times).unwrap();
        let d = res.diagnostics;
        assert!(d.trace_drift < 1e-8, "{d:?}");
        assert!(d.hermiticity < 1e-10);
        assert!(d.min_eigenvalue > -1e-6);
        let p = res.states.last().unwrap().populations();
        let middle: f64 = p[1..4].iter().sum();
        assert!(middle < 1e-3);
    }

    #[test]
    fn positivity_floor_aborts() {
        let model = build_dephasing_model(2, 1.0, 1.0, Representation::Dicke, OperatorMode::Collective).unwrap();
        let opts = MasterOptions { positivity_floor: 0.5, ..Default::default() };
        let err = integrate_master_with(&model, &model.all_up(), &[0.0, 0.1], &opts).unwrap_err();
        assert!(matches!(err, Error::Positivity { .. }));
    }
}
