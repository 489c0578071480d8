use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64};

/// Spin length `j`, stored as the integer `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinQuantumNumber {
    twice_j: u32,
}

impl SpinQuantumNumber {
    pub fn from_twice(twice_j: u32) -> Result<Self> {
        if twice_j == 0 {
            return Err(Error::InvalidArgument("spin j must be at least 1/2".into()));
        }
        Ok(Self { twice_j })
    }

    /// Accepts integer or half-integer `j >= 1/2`.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-12 || twice < 0.5 {
            return Err(Error::InvalidArgument(format!("j = {j} is not a positive half-integer")));
        }
        Self::from_twice(twice.round() as u32)
    }

    /// Spin of the symmetric subspace of `n` qubits.
    pub fn from_qubits(n: usize) -> Result<Self> {
        Self::from_twice(n as u32)
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    pub fn n_qubits(&self) -> usize {
        self.twice_j as usize
    }

    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    /// `J_z` eigenvalue at a basis index.
    pub fn m(&self, index: usize) -> f64 {
        self.j() - index as f64
    }

    pub fn index_of(&self, m: f64) -> Option<usize> {
        let i = self.j() - m;
        if (i - i.round()).abs() > 1e-9 || i < -1e-9 || i.round() as usize >= self.dim() {
            None
        } else {
            Some(i.round() as usize)
        }
    }

    pub fn north_index(&self) -> usize {
        0
    }

    pub fn south_index(&self) -> usize {
        self.twice_j as usize
    }
}

/// Direction on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalAngle {
    pub theta: f64,
    pub phi: f64,
}

impl SphericalAngle {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::OutOfRange(format!(
                "angle (theta = {theta}, phi = {phi}) outside [0, pi] x [0, 2pi)"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Wraps `phi` into `[0, 2π)`; `theta` must already be in range.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        Self::new(theta, phi.rem_euclid(2.0 * PI))
    }

    pub fn north() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn cos_angle_to(&self, other: &Self) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0)
    }
}

/// Normalized pure state in the Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeState {
    spin: SpinQuantumNumber,
    amplitudes: CVec,
}

impl DickeState {
    pub fn new(spin: SpinQuantumNumber, amplitudes: CVec) -> Result<Self> {
        if amplitudes.len() != spin.dim() {
            return Err(Error::DimensionMismatch {
                expected: spin.dim(),
                found: amplitudes.len(),
            });
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("squared norm {norm2} != 1")));
        }
        Ok(Self { spin, amplitudes })
    }

    /// Normalizes the given amplitudes before wrapping them.
    pub fn normalized(spin: SpinQuantumNumber, amplitudes: CVec) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(spin, amplitudes.unscale(norm))
    }

    pub fn basis(spin: SpinQuantumNumber, index: usize) -> Result<Self> {
        if index >= spin.dim() {
            return Err(Error::OutOfRange(format!("basis index {index} for dimension {}", spin.dim())));
        }
        let mut v = CVec::zeros(spin.dim());
        v[index] = c(1.0, 0.0);
        Ok(Self { spin, amplitudes: v })
    }

    pub fn north(spin: SpinQuantumNumber) -> Self {
        Self::basis(spin, spin.north_index()).expect("north index in range")
    }

    pub fn south(spin: SpinQuantumNumber) -> Self {
        Self::basis(spin, spin.south_index()).expect("south index in range")
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        self.spin
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amplitudes)
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = 1e-9;

    pub fn new(matrix: CMat) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        let herm = linalg::hermiticity_deviation(&matrix);
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("Hermiticity deviation {herm:.3e}")));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > Self::TRACE_TOL || tr.im.abs() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = linalg::min_eigenvalue(&matrix);
        if min < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix produced by a trusted, diagnosed computation.
    pub(crate) fn from_trusted(matrix: CMat) -> Self {
        Self { matrix }
    }

    pub fn from_pure(psi: &CVec) -> Self {
        Self { matrix: psi * psi.adjoint() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMat::identity(dim, dim) * c(1.0 / dim as f64, 0.0),
        }
    }

    /// Diagonal state with the given populations (normalized here).
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        if populations.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidState("negative population".into()));
        }
        let total: f64 = populations.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("populations sum to zero".into()));
        }
        let diag = CVec::from_iterator(populations.len(), populations.iter().map(|&p| c(p / total, 0.0)));
        Ok(Self { matrix: CMat::from_diagonal(&diag) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn population(&self, index: usize) -> f64 {
        self.matrix[(index, index)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.population(i)).collect()
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    pub fn expectation(&self, op: &CMat) -> f64 {
        linalg::trace(&(&self.matrix * op)).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }

    pub fn trace_distance(&self, other: &Self) -> f64 {
        linalg::trace_distance(&self.matrix, &other.matrix)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Spin coherent state `|Ω⟩` with amplitudes
/// `√C(2j, j+m) cos^{j+m}(θ/2) sin^{j−m}(θ/2) e^{−i(j−m)φ}`.
///
/// The azimuthal phase convention puts the whole `φ` dependence on the
/// lower components, so `|Ω(0, φ)⟩ = |+j⟩` for every `φ`.
pub fn make_coherent_state(spin: SpinQuantumNumber, angle: SphericalAngle) -> DickeState {
    DickeState {
        spin,
        amplitudes: coherent_amplitudes(spin, angle.theta, angle.phi),
    }
}

pub(crate) fn coherent_amplitudes(spin: SpinQuantumNumber, theta: f64, phi: f64) -> CVec {
    let n = spin.twice_j();
    let (s, co) = (0.5 * theta).sin_cos();
    CVec::from_iterator(
        spin.dim(),
        (0..=n).map(|i| {
            let mag = binomial(n, i).sqrt() * co.powi((n - i) as i32) * s.powi(i as i32);
            C64::from_polar(mag, -(i as f64) * phi)
        }),
    )
}

/// Closed-form `|⟨Ω₁|Ω₂⟩|² = ((1 + cos Θ)/2)^{2j}`.
pub fn coherent_overlap_law(spin: SpinQuantumNumber, a: &SphericalAngle, b: &SphericalAngle) -> f64 {
    (0.5 * (1.0 + a.cos_angle_to(b))).powi(spin.twice_j() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn north_coherent_state_is_top_basis_vector() {
        let spin = SpinQuantumNumber::new(5.0).unwrap();
        for phi in [0.0, 1.0, 4.0] {
            let s = make_coherent_state(spin, SphericalAngle::new(0.0, phi).unwrap());
            assert!((s.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);
            assert!(s.amplitudes().iter().skip(1).all(|a| a.norm() < 1e-15));
        }
    }

    #[test]
    fn qubit_coherent_state_is_bloch_vector() {
        let spin = SpinQuantumNumber::new(0.5).unwrap();
        let (theta, phi) = (1.1, 2.3);
        let s = make_coherent_state(spin, SphericalAngle::new(theta, phi).unwrap());
        assert!((s.amplitudes()[0] - c((theta / 2.0).cos(), 0.0)).norm() < 1e-15);
        let lower = C64::from_polar((theta / 2.0).sin(), -phi);
        assert!((s.amplitudes()[1] - lower).norm() < 1e-15);
    }

    #[test]
    fn pole_to_equator_overlap_for_spin_five() {
        let spin = SpinQuantumNumber::new(5.0).unwrap();
        let a = make_coherent_state(spin, SphericalAngle::north());
        let b = make_coherent_state(spin, SphericalAngle::new(PI / 2.0, 0.0).unwrap());
        // explicit amplitude sum
        let summed = a.inner(&b).norm_sqr();
        assert!((summed - 2f64.powi(-10)).abs() < 1e-15);
        assert!((summed - 9.765625e-4).abs() < 1e-12);
    }

    #[test]
    fn spin_rejects_non_half_integers() {
        assert!(SpinQuantumNumber::new(0.3).is_err());
        assert!(SpinQuantumNumber::new(0.0).is_err());
        assert_eq!(SpinQuantumNumber::new(2.5).unwrap().dim(), 6);
    }

    #[test]
    fn density_validation() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = c(1.2, 0.0);
        m[(1, 1)] = c(-0.2, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(3).into_matrix()).is_ok());
    }

    proptest! {
        #[test]
        fn overlap_law_holds(
            twice_j in 1u32..=20,
            t1 in 0.0..PI, p1 in 0.0..(2.0 * PI),
            t2 in 0.0..PI, p2 in 0.0..(2.0 * PI),
        ) {
            let spin = SpinQuantumNumber::from_twice(twice_j).unwrap();
            let a = SphericalAngle::new(t1, p1).unwrap();
            let b = SphericalAngle::new(t2, p2).unwrap();
            let sa = make_coherent_state(spin, a);
            let sb = make_coherent_state(spin, b);
            prop_assert!((sa.amplitudes().norm_squared() - 1.0).abs() < 1e-12);
            let overlap = sa.inner(&sb).norm_sqr();
            prop_assert!((overlap - coherent_overlap_law(spin, &a, &b)).abs() < 1e-10);
        }
    }
}
