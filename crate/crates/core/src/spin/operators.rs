use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, I};

use super::state::SpinQuantumNumber;

/// Dense full-space construction is limited to this many qubits.
pub const MAX_FULL_SPACE_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorLabel {
    Jz,
    Jplus,
    Jminus,
    Hamiltonian,
    Lindblad,
    Unitary,
    Other,
}

/// A labelled dense operator on either the Dicke or the full qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveOperator {
    matrix: CMat,
    label: OperatorLabel,
}

impl CollectiveOperator {
    pub fn new(matrix: CMat, label: OperatorLabel) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument("operator matrix must be square".into()));
        }
        match label {
            OperatorLabel::Hamiltonian => {
                let dev = linalg::hermiticity_deviation(&matrix);
                if dev > 1e-12 * (1.0 + matrix.norm()) {
                    return Err(Error::NotHermitian { deviation: dev });
                }
            }
            OperatorLabel::Unitary => {
                let n = matrix.nrows();
                let dev = linalg::max_abs_diff(&(matrix.adjoint() * &matrix), &CMat::identity(n, n));
                if dev > 1e-10 {
                    return Err(Error::InvalidArgument(format!("matrix is not unitary (deviation {dev:.3e})")));
                }
            }
            _ => {}
        }
        Ok(Self { matrix, label })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn label(&self) -> OperatorLabel {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub jz: CollectiveOperator,
    pub jplus: CollectiveOperator,
    pub jminus: CollectiveOperator,
}

pub fn build_spin_operators(spin: SpinQuantumNumber) -> SpinOperators {
    let d = spin.dim();
    let j = spin.j();
    let jz = CMat::from_fn(d, d, |r, col| if r == col { c(spin.m(r), 0.0) } else { c(0.0, 0.0) });
    // J+ |m⟩ = √(j(j+1) − m(m+1)) |m+1⟩ ; |m+1⟩ sits one index lower.
    let jplus = CMat::from_fn(d, d, |r, col| {
        if col >= 1 && r == col - 1 {
            let m = spin.m(col);
            c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let jminus = jplus.adjoint();
    SpinOperators {
        jz: CollectiveOperator { matrix: jz, label: OperatorLabel::Jz },
        jplus: CollectiveOperator { matrix: jplus, label: OperatorLabel::Jplus },
        jminus: CollectiveOperator { matrix: jminus, label: OperatorLabel::Jminus },
    }
}

/// `H = iω(|−j⟩⟨+j| − |+j⟩⟨−j|)`, coupling only the two extremal states.
pub fn build_nonclassical_hamiltonian(spin: SpinQuantumNumber, omega: f64) -> Result<CollectiveOperator> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    let d = spin.dim();
    let (n, s) = (spin.north_index(), spin.south_index());
    let mut h = CMat::zeros(d, d);
    h[(s, n)] = I * omega;
    h[(n, s)] = -I * omega;
    CollectiveOperator::new(h, OperatorLabel::Hamiltonian)
}

/// `exp(−iHt)` by Hermitian eigendecomposition.
pub fn propagator(h: &CollectiveOperator, t: f64) -> Result<CollectiveOperator> {
    let u = linalg::expm_hermitian(h.matrix(), t)?;
    CollectiveOperator::new(u, OperatorLabel::Unitary)
}

/// Closed-form propagator of [`build_nonclassical_hamiltonian`]:
/// `cos ωt` on the extremal diagonal, `+sin ωt |−j⟩⟨+j|`, `−sin ωt |+j⟩⟨−j|`
/// and the identity on every other Dicke state.
pub fn nonclassical_propagator(spin: SpinQuantumNumber, omega: f64, t: f64) -> CMat {
    let d = spin.dim();
    let (n, s) = (spin.north_index(), spin.south_index());
    let (sin, cos) = (omega * t).sin_cos();
    let mut u = CMat::identity(d, d);
    u[(n, n)] = c(cos, 0.0);
    u[(s, s)] = c(cos, 0.0);
    u[(s, n)] = c(sin, 0.0);
    u[(n, s)] = c(-sin, 0.0);
    u
}

/// Precession rate of the symmetric-subspace Hamiltonian equivalent to the
/// full-space product Hamiltonian with coefficient `omega`.
pub fn effective_omega(n_qubits: usize, omega: f64) -> f64 {
    omega * 2f64.powi(n_qubits as i32 - 1)
}

/// `σ⁺ = σˣ + iσʸ = 2|↑⟩⟨↓|` (twice the usual ladder operator).
pub fn qubit_raising() -> CMat {
    let mut m = CMat::zeros(2, 2);
    m[(0, 1)] = c(2.0, 0.0);
    m
}

/// `σ⁻ = σˣ − iσʸ = 2|↓⟩⟨↑|`.
pub fn qubit_lowering() -> CMat {
    qubit_raising().adjoint()
}

/// Embeds a single-qubit operator acting on qubit `k` into the `n`-qubit space.
pub fn qubit_operator(n: usize, k: usize, single: &CMat) -> CMat {
    let id = CMat::identity(2, 2);
    (0..n).fold(CMat::identity(1, 1), |acc, q| {
        linalg::kron(&acc, if q == k { single } else { &id })
    })
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FULL_SPACE_QUBITS {
        return Err(Error::OutOfRange(format!(
            "qubit count {n} outside 1..={MAX_FULL_SPACE_QUBITS}"
        )));
    }
    Ok(())
}

/// Full-space product Hamiltonian `(ω/2)·i(σ⁻₁⋯σ⁻_N − σ⁺₁⋯σ⁺_N)`.
///
/// Without the factor `i` the difference of the two products is
/// anti-Hermitian; with it the operator restricts on the symmetric subspace
/// to exactly `2^{N−1}` times [`build_nonclassical_hamiltonian`] at the same
/// `ω` (see [`effective_omega`]).
pub fn build_product_hamiltonian(n: usize, omega: f64) -> Result<CollectiveOperator> {
    check_qubits(n)?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    let raise = qubit_raising();
    let lower = qubit_lowering();
    let all_raise = (0..n).fold(CMat::identity(1, 1), |acc, _| linalg::kron(&acc, &raise));
    let all_lower = (0..n).fold(CMat::identity(1, 1), |acc, _| linalg::kron(&acc, &lower));
    let h = (all_lower - all_raise) * (I * (0.5 * omega));
    CollectiveOperator::new(h, OperatorLabel::Hamiltonian)
}

pub(crate) fn check_full_space(n: usize) -> Result<()> {
    check_qubits(n)
}
