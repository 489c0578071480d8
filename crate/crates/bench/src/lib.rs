//! Shared fixtures for the criterion benchmarks.

use macroreal_core::dynamics::{build_dephasing_model, build_thermal_model, LindbladModel, OperatorMode, Representation};
use macroreal_core::linalg::{self, CVec};

pub const OMEGA: f64 = 1.0 / 16.0;

pub fn dephasing(n: usize, repr: Representation) -> LindbladModel {
    build_dephasing_model(n, OMEGA, 1.0, repr, OperatorMode::Collective).expect("valid model")
}

pub fn thermal(n: usize, repr: Representation) -> LindbladModel {
    build_thermal_model(n, OMEGA, 0.1, 10.0, repr, OperatorMode::Collective).expect("valid model")
}

/// The all-up pure state as an amplitude vector.
pub fn north_vector(model: &LindbladModel) -> CVec {
    let mut psi = CVec::zeros(model.dim());
    psi[0] = linalg::c(1.0, 0.0);
    psi
}
