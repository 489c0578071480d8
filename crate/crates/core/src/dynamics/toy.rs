//! Stepwise dephasing model: free evolution under the two-state
//! Hamiltonian for `Δt`, then complete loss of the `|+j⟩⟨−j|` coherences.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::spin::{nonclassical_propagator, DensityMatrix, DickeState, SpinQuantumNumber};

use super::survival::SurvivalSeries;

/// Weight outside `span{|+j⟩, |−j⟩}` tolerated by [`toy_step`].
pub const TOY_LEAKAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyModelParams {
    omega: f64,
    delta_t: f64,
    n_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToyWarning {
    /// `ωΔt < 0.05`: decoherence so frequent that the state freezes.
    ZenoRegime { omega_dt: f64 },
    /// `ωΔt > 1`: a single step already exceeds the dynamical timescale.
    StepExceedsDynamics { omega_dt: f64 },
}

impl fmt::Display for ToyWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZenoRegime { omega_dt } => {
                write!(f, "Zeno regime: omega*dt = {omega_dt} < 0.05 freezes the initial state")
            }
            Self::StepExceedsDynamics { omega_dt } => {
                write!(f, "omega*dt = {omega_dt} > 1 exceeds the dynamical timescale")
            }
        }
    }
}

impl ToyModelParams {
    pub const ZENO_LIMIT: f64 = 0.05;
    pub const DYNAMICS_LIMIT: f64 = 1.0;

    /// `delta_t = 0` is accepted and yields the identity step.
    pub fn new(omega: f64, delta_t: f64, n_steps: usize) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
        }
        if !(delta_t >= 0.0 && delta_t.is_finite()) {
            return Err(Error::InvalidArgument(format!("delta_t must be non-negative, got {delta_t}")));
        }
        Ok(Self { omega, delta_t, n_steps })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn omega_dt(&self) -> f64 {
        self.omega * self.delta_t
    }

    /// `c = cos²(ωΔt)`.
    pub fn c(&self) -> f64 {
        self.omega_dt().cos().powi(2)
    }

    pub fn warnings(&self) -> Vec<ToyWarning> {
        let x = self.omega_dt();
        let mut w = Vec::new();
        if x < Self::ZENO_LIMIT {
            w.push(ToyWarning::ZenoRegime { omega_dt: x });
        }
        if x > Self::DYNAMICS_LIMIT {
            w.push(ToyWarning::StepExceedsDynamics { omega_dt: x });
        }
        w
    }

    /// Decay rate `−ln(cos 2ωΔt)/Δt` of the exact recurrence (for `ωΔt < π/4`).
    pub fn exact_rate(&self) -> f64 {
        -(2.0 * self.omega_dt()).cos().ln() / self.delta_t
    }

    /// The small-step approximation `2 sin²(ωΔt)/Δt`.
    pub fn approximate_rate(&self) -> f64 {
        2.0 * self.omega_dt().sin().powi(2) / self.delta_t
    }
}

fn leakage(rho: &CMat, north: usize, south: usize) -> f64 {
    let mut w = 0.0;
    for r in 0..rho.nrows() {
        for col in 0..rho.ncols() {
            let inside = (r == north || r == south) && (col == north || col == south);
            if !inside {
                w += rho[(r, col)].norm();
            }
        }
    }
    w
}

/// One step: `ρ → U_Δt ρ U_Δt†`, then zero the `(+j, −j)` coherences.
pub fn toy_step(rho: &DensityMatrix, params: &ToyModelParams) -> Result<DensityMatrix> {
    let spin = SpinQuantumNumber::from_twice(rho.dim().saturating_sub(1) as u32)?;
    let (n, s) = (spin.north_index(), spin.south_index());
    let leak = leakage(rho.matrix(), n, s);
    if leak > TOY_LEAKAGE_TOL {
        return Err(Error::Leakage { leakage: leak, tolerance: TOY_LEAKAGE_TOL });
    }
    let u = nonclassical_propagator(spin, params.omega, params.delta_t);
    let mut out = &u * rho.matrix() * u.adjoint();
    out[(n, s)] = c(0.0, 0.0);
    out[(s, n)] = c(0.0, 0.0);
    Ok(DensityMatrix::from_trusted(out))
}

/// Applies `steps` toy steps, returning every intermediate state
/// (`steps + 1` entries).
pub fn toy_evolve(rho: &DensityMatrix, params: &ToyModelParams, steps: usize) -> Result<Vec<DensityMatrix>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(rho.clone());
    for _ in 0..steps {
        let next = toy_step(out.last().unwrap(), params)?;
        out.push(next);
    }
    Ok(out)
}

/// `A_n` from `A_n = c A_{n−1} + (1−c)(1−A_{n−1})`, `A_0 = 1`.
pub fn survival_recurrence(c: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange(format!("c = {c} outside [0, 1]")));
    }
    Ok((0..n).fold(1.0, |a, _| c * a + (1.0 - c) * (1.0 - a)))
}

/// `A_n = ½(1 + (2c − 1)^n)`.
pub fn survival_closed_form(c: f64, n: usize) -> f64 {
    0.5 * (1.0 + (2.0 * c - 1.0).powi(n as i32))
}

/// North-state survival under the toy model, starting from `|+j⟩`.
pub fn toy_survival_series(spin: SpinQuantumNumber, params: &ToyModelParams) -> Result<SurvivalSeries> {
    let states = toy_evolve(&DickeState::north(spin).density(), params, params.n_steps)?;
    let times = (0..=params.n_steps).map(|k| k as f64 * params.delta_t).collect();
    let values = states.iter().map(|r| r.population(spin.north_index())).collect();
    SurvivalSeries::new(times, values)
}
