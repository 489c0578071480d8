use crate::dynamics::{integrate_master_with, toy_step, LindbladModel, MasterOptions, ToyModelParams};
use crate::error::{Error, Result};
use crate::spin::{nonclassical_propagator, DensityMatrix, SpinQuantumNumber};

/// A time-homogeneous evolution engine on the Dicke space.
pub trait Channel: Sync {
    fn spin(&self) -> SpinQuantumNumber;

    /// Evolves `rho` over an elapsed time `duration ≥ 0`.
    fn evolve(&self, rho: &DensityMatrix, duration: f64) -> Result<DensityMatrix>;

    /// Nearest time the channel can resolve.
    fn align(&self, t: f64) -> f64 {
        t
    }
}

fn check_duration(d: f64) -> Result<()> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("evolution time must be non-negative, got {d}")));
    }
    Ok(())
}

/// Unitary evolution under the two-state Hamiltonian.
#[derive(Debug, Clone, Copy)]
pub struct ClosedChannel {
    pub spin: SpinQuantumNumber,
    pub omega: f64,
}

impl Channel for ClosedChannel {
    fn spin(&self) -> SpinQuantumNumber {
        self.spin
    }

    fn evolve(&self, rho: &DensityMatrix, duration: f64) -> Result<DensityMatrix> {
        check_duration(duration)?;
        let u = nonclassical_propagator(self.spin, self.omega, duration);
        DensityMatrix::new(crate::linalg::hermitian_part(&(&u * rho.matrix() * u.adjoint())))
    }
}

/// The stepwise dephasing model; times are multiples of `Δt`.
#[derive(Debug, Clone, Copy)]
pub struct ToyChannel {
    pub spin: SpinQuantumNumber,
    pub params: ToyModelParams,
}

impl ToyChannel {
    fn steps(&self, duration: f64) -> Result<usize> {
        let dt = self.params.delta_t();
        if dt == 0.0 {
            return Ok(0);
        }
        let n = (duration / dt).round();
        if (n * dt - duration).abs() > 1e-9 * dt.max(duration) {
            return Err(Error::InvalidArgument(format!(
                "toy channel time {duration} is not a multiple of the step {dt}"
            )));
        }
        Ok(n as usize)
    }
}

impl Channel for ToyChannel {
    fn spin(&self) -> SpinQuantumNumber {
        self.spin
    }

    fn evolve(&self, rho: &DensityMatrix, duration: f64) -> Result<DensityMatrix> {
        check_duration(duration)?;
        let mut r = rho.clone();
        for _ in 0..self.steps(duration)? {
            r = toy_step(&r, &self.params)?;
        }
        Ok(r)
    }

    fn align(&self, t: f64) -> f64 {
        let dt = self.params.delta_t();
        if dt == 0.0 {
            t
        } else {
            (t / dt).round() * dt
        }
    }
}

/// Lindblad evolution of a Dicke-space model.
#[derive(Debug, Clone)]
pub struct MasterChannel {
    pub model: LindbladModel,
    pub options: MasterOptions,
}

impl MasterChannel {
    pub fn new(model: LindbladModel) -> Self {
        Self { model, options: MasterOptions::default() }
    }
}

impl Channel for MasterChannel {
    fn spin(&self) -> SpinQuantumNumber {
        SpinQuantumNumber::from_twice(self.model.dim() as u32 - 1).expect("non-empty model")
    }

    fn evolve(&self, rho: &DensityMatrix, duration: f64) -> Result<DensityMatrix> {
        check_duration(duration)?;
        if duration == 0.0 {
            return Ok(rho.clone());
        }
        let res = integrate_master_with(&self.model, rho, &[0.0, duration], &self.options)?;
        Ok(res.states.into_iter().last().expect("two grid points"))
    }
}
