//! Husimi Q-distributions and coarse-grained coherent-state measurements.

mod grid;
mod povm;
mod q;
pub mod quadrature;
mod slots;

pub use grid::SphereGrid;
pub use povm::{build_povm, PovmSet, Reduction, COMPLETENESS_TOL, UNREACHABLE_PROBABILITY};
pub use q::{q_distribution, slot_probabilities, QDistribution};
pub use slots::{AngularRect, Slot, SlotPartition};
