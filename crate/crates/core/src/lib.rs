//! Simulation and analysis of the quantum-to-classical transition for a
//! collective spin-j.
//!
//! * [`spin`]: Dicke-basis algebra, coherent states, the two-state
//!   "non-classical" Hamiltonian and its N-qubit product form.
//! * [`husimi`]: sphere quadrature, Husimi Q-distributions and
//!   coarse-grained coherent-state POVMs.
//! * [`dynamics`]: closed evolution, the stepwise dephasing toy model,
//!   the Lindblad master equation and its quantum-state-diffusion
//!   unraveling.
//! * [`checks`]: macrorealism (no-signalling-in-time on the Q-function),
//!   the multiplicativity criterion and the continuity witness.

pub mod checks;
pub mod dynamics;
pub mod error;
pub mod husimi;
pub mod linalg;
pub mod spin;

pub use error::{Error, Result};
pub use spin::{CollectiveOperator, DensityMatrix, DickeState, SphericalAngle, SpinQuantumNumber};
