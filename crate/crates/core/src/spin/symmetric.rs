use crate::error::{Error, Result};
use crate::linalg::{c, CMat, CVec};

use super::operators::check_full_space;
use super::state::{DensityMatrix, DickeState, SpinQuantumNumber};

/// Isometry `V` from the Dicke basis of `N = 2j` qubits into the full
/// `2^N`-dimensional product space.
#[derive(Debug, Clone)]
pub struct SymmetricEmbedding {
    spin: SpinQuantumNumber,
    isometry: CMat,
}

impl SymmetricEmbedding {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_full_space(n_qubits)?;
        let spin = SpinQuantumNumber::from_qubits(n_qubits)?;
        let full = 1usize << n_qubits;
        let mut counts = vec![0usize; spin.dim()];
        for x in 0..full {
            counts[x.count_ones() as usize] += 1;
        }
        let isometry = CMat::from_fn(full, spin.dim(), |x, k| {
            if x.count_ones() as usize == k {
                c(1.0 / (counts[k] as f64).sqrt(), 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        Ok(Self { spin, isometry })
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        self.spin
    }

    pub fn isometry(&self) -> &CMat {
        &self.isometry
    }

    pub fn embed(&self, state: &DickeState) -> Result<CVec> {
        if state.spin() != self.spin {
            return Err(Error::DimensionMismatch {
                expected: self.spin.dim(),
                found: state.spin().dim(),
            });
        }
        Ok(&self.isometry * state.amplitudes())
    }

    pub fn embed_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dicke(rho.dim())?;
        Ok(DensityMatrix::from_trusted(&self.isometry * rho.matrix() * self.isometry.adjoint()))
    }

    /// `V† A V`.
    pub fn project_operator(&self, a: &CMat) -> Result<CMat> {
        self.check_full(a.nrows())?;
        Ok(self.isometry.adjoint() * a * &self.isometry)
    }

    pub fn project(&self, rho: &DensityMatrix, tolerance: f64) -> Result<DickeProjection> {
        self.check_full(rho.dim())?;
        let reduced = self.isometry.adjoint() * rho.matrix() * &self.isometry;
        let kept: f64 = reduced.diagonal().iter().map(|z| z.re).sum();
        let leakage = (rho.trace().re - kept).max(0.0);
        if leakage > tolerance {
            return Err(Error::Leakage { leakage, tolerance });
        }
        Ok(DickeProjection {
            rho: DensityMatrix::from_trusted(reduced),
            leakage,
        })
    }

    fn check_full(&self, dim: usize) -> Result<()> {
        let full = self.isometry.nrows();
        if dim != full {
            return Err(Error::DimensionMismatch { expected: full, found: dim });
        }
        Ok(())
    }

    fn check_dicke(&self, dim: usize) -> Result<()> {
        if dim != self.spin.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.spin.dim(),
                found: dim,
            });
        }
        Ok(())
    }
}

/// Dicke-basis image of a full-space state plus the weight that was lost
/// outside the symmetric subspace.
#[derive(Debug, Clone)]
pub struct DickeProjection {
    pub rho: DensityMatrix,
    pub leakage: f64,
}

pub fn symmetric_embed(state: &DickeState, n_qubits: usize) -> Result<CVec> {
    SymmetricEmbedding::new(n_qubits)?.embed(state)
}

pub fn dicke_project(rho: &DensityMatrix, n_qubits: usize, tolerance: f64) -> Result<DickeProjection> {
    SymmetricEmbedding::new(n_qubits)?.project(rho, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, C64};
    use crate::spin::{build_product_hamiltonian, effective_omega, build_nonclassical_hamiltonian, propagator};
    use proptest::prelude::*;

    #[test]
    fn triplet_zero() {
        let spin = SpinQuantumNumber::from_qubits(2).unwrap();
        let v = symmetric_embed(&DickeState::basis(spin, 1).unwrap(), 2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let expected = [0.0, h, h, 0.0];
        for (a, e) in v.iter().zip(expected) {
            assert!((a - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn projection_reports_leakage() {
        // singlet lives entirely outside the symmetric subspace
        let h = 1.0 / 2f64.sqrt();
        let singlet = CVec::from_vec(vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]);
        let rho = DensityMatrix::from_pure(&singlet);
        let err = dicke_project(&rho, 2, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Leakage { leakage, .. } if (leakage - 1.0).abs() < 1e-12));
    }

    #[test]
    fn product_hamiltonian_restricts_to_scaled_nonclassical() {
        for n in 1..=6 {
            let emb = SymmetricEmbedding::new(n).unwrap();
            let h_full = build_product_hamiltonian(n, 0.7).unwrap();
            let restricted = emb.project_operator(h_full.matrix()).unwrap();
            let h_dicke = build_nonclassical_hamiltonian(emb.spin(), effective_omega(n, 0.7)).unwrap();
            assert!(max_abs_diff(&restricted, h_dicke.matrix()) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn evolution_stays_symmetric() {
        let n = 4;
        let emb = SymmetricEmbedding::new(n).unwrap();
        let spin = emb.spin();
        let psi = DickeState::normalized(
            spin,
            CVec::from_iterator(5, (0..5).map(|k| C64::new(1.0 + k as f64, 0.3 * k as f64))),
        )
        .unwrap();
        let full = emb.embed(&psi).unwrap();
        let h = build_product_hamiltonian(n, 1.0).unwrap();
        for t in [0.1, 0.77, 2.5] {
            let u = propagator(&h, t).unwrap();
            let evolved = DensityMatrix::from_pure(&(u.matrix() * &full));
            let proj = emb.project(&evolved, 1e-10).unwrap();
            assert!(proj.leakage < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn embed_then_project_is_identity(
            n in 1usize..=6,
            re in proptest::collection::vec(-1.0..1.0f64, 7),
            im in proptest::collection::vec(-1.0..1.0f64, 7),
        ) {
            let emb = SymmetricEmbedding::new(n).unwrap();
            let d = n + 1;
            let amps = CVec::from_iterator(d, (0..d).map(|k| C64::new(re[k] + 1e-3, im[k])));
            let psi = DickeState::normalized(emb.spin(), amps).unwrap();
            let full = emb.embed(&psi).unwrap();
            let proj = emb.project(&DensityMatrix::from_pure(&full), 1e-12).unwrap();
            prop_assert!(proj.leakage < 1e-12);
            prop_assert!(max_abs_diff(proj.rho.matrix(), psi.density().matrix()) < 1e-12);
        }
    }
}
