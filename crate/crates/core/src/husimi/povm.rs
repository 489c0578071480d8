use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::spin::{CollectiveOperator, DensityMatrix, OperatorLabel};

use super::grid::SphereGrid;
use super::slots::SlotPartition;

/// Coarse-grained coherent-state POVM with its principal-root Kraus
/// operators.
#[derive(Debug, Clone)]
pub struct PovmSet {
    partition: SlotPartition,
    elements: Vec<CollectiveOperator>,
    kraus: Vec<CMat>,
    completeness_residual: f64,
}

/// Result of a selective measurement.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub probability: f64,
    pub state: DensityMatrix,
}

pub const COMPLETENESS_TOL: f64 = 1e-8;
pub const UNREACHABLE_PROBABILITY: f64 = 1e-12;

/// `P_k = (2j+1)/(4π) ∬_{Ω_k} |Ω⟩⟨Ω| d²Ω` by quadrature, `M_k = √P_k`.
pub fn build_povm(partition: &SlotPartition, grid: &SphereGrid) -> Result<PovmSet> {
    let spin = partition.spin();
    let owners = partition.assign(grid)?;
    let d = spin.dim();
    let mut elements = Vec::with_capacity(partition.len());
    let mut kraus = Vec::with_capacity(partition.len());
    let mut total = CMat::zeros(d, d);
    for k in 0..partition.len() {
        let p = linalg::hermitian_part(&grid.frame_operator(spin, |i| owners[i] == k));
        let ev = linalg::eigvalsh(&p);
        if ev[0] < -1e-9 || ev[d - 1] > 1.0 + 1e-9 {
            return Err(Error::Quadrature {
                residual: (-ev[0]).max(ev[d - 1] - 1.0),
                tolerance: 1e-9,
            });
        }
        let m = linalg::sqrt_psd(&p);
        let dev = linalg::max_abs_diff(&(m.adjoint() * &m), &p);
        if dev > 1e-9 {
            return Err(Error::Quadrature { residual: dev, tolerance: 1e-9 });
        }
        total += &p;
        elements.push(CollectiveOperator::new(p, OperatorLabel::Other)?);
        kraus.push(m);
    }
    let residual = linalg::max_abs_diff(&total, &CMat::identity(d, d));
    if residual > COMPLETENESS_TOL {
        return Err(Error::Quadrature { residual, tolerance: COMPLETENESS_TOL });
    }
    Ok(PovmSet {
        partition: partition.clone(),
        elements,
        kraus,
        completeness_residual: residual,
    })
}

impl PovmSet {
    pub fn partition(&self) -> &SlotPartition {
        &self.partition
    }

    pub fn elements(&self) -> &[CollectiveOperator] {
        &self.elements
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn completeness_residual(&self) -> f64 {
        self.completeness_residual
    }

    /// `w_k = Tr[ρ P_k]`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.check_dim(rho)?;
        Ok(self.elements.iter().map(|p| rho.expectation(p.matrix())).collect())
    }

    /// `ρ_k = M_k ρ M_k† / w_k`, refusing outcomes with `w_k ≤ 1e-12`.
    pub fn kraus_reduce(&self, rho: &DensityMatrix, k: usize) -> Result<Reduction> {
        self.check_dim(rho)?;
        let m = self
            .kraus
            .get(k)
            .ok_or_else(|| Error::OutOfRange(format!("slot {k} of {}", self.len())))?;
        let unnormalized = m * rho.matrix() * m.adjoint();
        let probability = linalg::trace(&unnormalized).re;
        if probability <= UNREACHABLE_PROBABILITY {
            return Err(Error::UnreachableOutcome { slot: k, probability });
        }
        let state = linalg::hermitian_part(&(unnormalized / linalg::c(probability, 0.0)));
        Ok(Reduction {
            probability,
            state: DensityMatrix::from_trusted(state),
        })
    }

    fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        let d = self.partition.spin().dim();
        if rho.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho.dim() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::husimi::{q_distribution, slot_probabilities};
    use crate::linalg::{c, max_abs_diff};
    use crate::spin::{DickeState, SpinQuantumNumber};

    #[test]
    fn whole_sphere_povm_is_identity() {
        let spin = SpinQuantumNumber::new(4.0).unwrap();
        let part = SlotPartition::whole_sphere(spin);
        let povm = build_povm(&part, &SphereGrid::for_partition(&part).unwrap()).unwrap();
        assert!(max_abs_diff(povm.elements()[0].matrix(), &CMat::identity(9, 9)) < 1e-8);
        let rho = DickeState::north(spin).density();
        let r = povm.kraus_reduce(&rho, 0).unwrap();
        assert!((r.probability - 1.0).abs() < 1e-8);
        assert!(max_abs_diff(r.state.matrix(), rho.matrix()) < 1e-8);
    }

    #[test]
    fn qubit_hemispheres() {
        // 1D oracle: P_north = diag(∫₀^{π/2} cos²(θ/2) sinθ dθ, ∫ sin²(θ/2) sinθ dθ) = diag(3/4, 1/4)
        let spin = SpinQuantumNumber::new(0.5).unwrap();
        let part = SlotPartition::hemispheres(spin);
        let povm = build_povm(&part, &SphereGrid::for_partition(&part).unwrap()).unwrap();
        let pn = povm.elements()[0].matrix();
        let mut expected = CMat::zeros(2, 2);
        expected[(0, 0)] = c(0.75, 0.0);
        expected[(1, 1)] = c(0.25, 0.0);
        assert!(max_abs_diff(pn, &expected) < 1e-12);
        let sum = pn + povm.elements()[1].matrix();
        assert!(max_abs_diff(&sum, &CMat::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn unreachable_outcome_is_reported() {
        // j = 1/2 north state has 1/4 weight in the south hemisphere, so build an
        // operator-level case instead: a POVM slot with zero overlap.
        let spin = SpinQuantumNumber::new(10.0).unwrap();
        let part = SlotPartition::theta_bands(spin, 0.3).unwrap();
        let povm = build_povm(&part, &SphereGrid::for_partition(&part).unwrap()).unwrap();
        let rho = DickeState::north(spin).density();
        let last = povm.len() - 1;
        let err = povm.kraus_reduce(&rho, last).unwrap_err();
        assert!(matches!(err, Error::UnreachableOutcome { slot, .. } if slot == last));
    }

    #[test]
    fn trace_and_quadrature_probabilities_agree() {
        let spin = SpinQuantumNumber::new(5.0).unwrap();
        let part = SlotPartition::three_region(spin);
        let grid = SphereGrid::for_partition(&part).unwrap();
        let povm = build_povm(&part, &grid).unwrap();
        let psi = DickeState::normalized(
            spin,
            crate::linalg::CVec::from_iterator(11, (0..11).map(|k| c((k as f64).sin() + 0.2, 0.1 * k as f64))),
        )
        .unwrap();
        let rho = psi.density();
        let a = povm.probabilities(&rho).unwrap();
        let b = slot_probabilities(&q_distribution(&rho, &grid).unwrap(), &part).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}
