use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spin::{make_coherent_state, DensityMatrix, SpinQuantumNumber};

use super::grid::SphereGrid;
use super::slots::SlotPartition;

/// Husimi function `Q(Ω) = (2j+1)/(4π) ⟨Ω|ρ|Ω⟩` sampled at the grid nodes.
#[derive(Debug, Clone)]
pub struct QDistribution<'g> {
    values: Vec<f64>,
    grid: &'g SphereGrid,
}

pub(crate) fn spin_of(rho: &DensityMatrix) -> Result<SpinQuantumNumber> {
    if rho.dim() < 2 {
        return Err(Error::InvalidArgument("state dimension must be at least 2".into()));
    }
    SpinQuantumNumber::from_twice(rho.dim() as u32 - 1)
}

pub fn q_distribution<'g>(rho: &DensityMatrix, grid: &'g SphereGrid) -> Result<QDistribution<'g>> {
    let spin = spin_of(rho)?;
    let norm = spin.dim() as f64 / (4.0 * PI);
    let m = rho.matrix();
    let values = grid
        .nodes()
        .iter()
        .map(|a| {
            let z = make_coherent_state(spin, *a);
            let z = z.amplitudes();
            (z.adjoint() * m * z)[(0, 0)].re * norm
        })
        .collect();
    Ok(QDistribution { values, grid })
}

impl<'g> QDistribution<'g> {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &'g SphereGrid {
        self.grid
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ_k w_k Q_k`; all components must share one grid.
    pub fn mixture(components: &[(f64, QDistribution<'g>)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let grid = first.1.grid;
        let mut values = vec![0.0; grid.len()];
        for (w, q) in components {
            if !std::ptr::eq(q.grid, grid) {
                return Err(Error::InvalidArgument("mixture components live on different grids".into()));
            }
            for (acc, v) in values.iter_mut().zip(&q.values) {
                *acc += w * v;
            }
        }
        Ok(Self { values, grid })
    }

    /// `½ ∫ |Q₁ − Q₂| d²Ω`.
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        Ok(0.5 * self.l1_distance(other)?)
    }

    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                found: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.grid.weights())
            .map(|((a, b), w)| w * (a - b).abs())
            .sum())
    }
}

/// `w_k = ∬_{Ω_k} Q(Ω) d²Ω` for every slot.
pub fn slot_probabilities(q: &QDistribution<'_>, partition: &SlotPartition) -> Result<Vec<f64>> {
    let owners = partition.assign(q.grid)?;
    let mut w = vec![0.0; partition.len()];
    for ((k, v), weight) in owners.iter().zip(&q.values).zip(q.grid.weights()) {
        w[*k] += v * weight;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{DickeState, SphericalAngle};

    #[test]
    fn maximally_mixed_is_isotropic() {
        let grid = SphereGrid::new(32, 32).unwrap();
        let q = q_distribution(&DensityMatrix::maximally_mixed(11), &grid).unwrap();
        assert!(q.values().iter().all(|v| (v - 1.0 / (4.0 * PI)).abs() < 1e-12));
        assert!((q.integral() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn north_state_profile() {
        let spin = SpinQuantumNumber::new(5.0).unwrap();
        let grid = SphereGrid::for_spin(spin).unwrap();
        let q = q_distribution(&DickeState::north(spin).density(), &grid).unwrap();
        for (a, v) in grid.nodes().iter().zip(q.values()).step_by(97) {
            let expected = 11.0 / (4.0 * PI) * (a.theta / 2.0).cos().powi(20);
            assert!((v - expected).abs() < 1e-12);
        }
        // value at the pole itself
        let z = make_coherent_state(spin, SphericalAngle::north());
        let at_pole = 11.0 / (4.0 * PI) * DickeState::north(spin).inner(&z).norm_sqr();
        assert!((at_pole - 11.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((at_pole - 0.8754).abs() < 1e-4);
    }

    #[test]
    fn whole_sphere_and_hemispheres() {
        let spin = SpinQuantumNumber::new(3.0).unwrap();
        let grid = SphereGrid::for_partition(&SlotPartition::hemispheres(spin)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(7);
        let q = q_distribution(&mixed, &grid).unwrap();
        let whole = slot_probabilities(&q, &SlotPartition::whole_sphere(spin)).unwrap();
        assert!((whole[0] - 1.0).abs() < 1e-10);
        let halves = slot_probabilities(&q, &SlotPartition::hemispheres(spin)).unwrap();
        assert!((halves[0] - 0.5).abs() < 1e-10 && (halves[1] - 0.5).abs() < 1e-10);
    }
}
