//! Collective spin-j algebra in the Dicke basis and on the full N-qubit
//! tensor-product space.
//!
//! Dicke basis index `i` holds the `J_z` eigenvalue `m = j - i`, so index 0 is
//! the north state `|+j⟩` and index `2j` the south state `|-j⟩`. On the full
//! space a qubit in state `|↑⟩` is bit 0, qubit 1 is the most significant
//! bit, and the number of down spins in a product state equals the Dicke
//! index it contributes to.

mod operators;
mod state;
mod symmetric;

pub use operators::{
    build_nonclassical_hamiltonian, build_product_hamiltonian, build_spin_operators,
    effective_omega, nonclassical_propagator, propagator, qubit_lowering, qubit_operator,
    qubit_raising, CollectiveOperator, OperatorLabel, SpinOperators, MAX_FULL_SPACE_QUBITS,
};
pub use state::{
    coherent_overlap_law, make_coherent_state, DensityMatrix, DickeState, SphericalAngle,
    SpinQuantumNumber,
};
pub use symmetric::{dicke_project, symmetric_embed, DickeProjection, SymmetricEmbedding};
