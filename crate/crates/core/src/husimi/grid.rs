use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::spin::{SphericalAngle, SpinQuantumNumber};

use super::quadrature::gauss_legendre_interval;
use super::slots::SlotPartition;

/// Product quadrature on the unit sphere: Gauss–Legendre in `cos θ` times a
/// rule in `φ`. Weights are in steradians.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    nodes: Vec<SphericalAngle>,
    weights: Vec<f64>,
}

/// Smallest node count along either axis.
pub const MIN_AXIS_NODES: usize = 8;
/// Node floor per panel when the grid is split at slot borders.
const MIN_PANEL_NODES: usize = 16;

impl SphereGrid {
    /// `n_theta` Gauss–Legendre nodes in `cos θ` and `n_phi` equispaced
    /// azimuths.
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        Self::with_breaks(&[0.0, PI], &[0.0, 2.0 * PI], n_theta, n_phi)
    }

    /// Default resolution `max(64, 8(2j+1))` per axis.
    pub fn default_resolution(spin: SpinQuantumNumber) -> usize {
        64.max(8 * spin.dim())
    }

    pub fn for_spin(spin: SpinQuantumNumber) -> Result<Self> {
        let n = Self::default_resolution(spin);
        Self::new(n, n)
    }

    /// Grid whose panels are aligned with the partition's borders, so each
    /// slot integral is a union of whole panels.
    pub fn for_partition(partition: &SlotPartition) -> Result<Self> {
        let n = Self::default_resolution(partition.spin());
        let (theta, phi) = partition.breakpoints();
        Self::with_breaks(&theta, &phi, n, n)
    }

    /// Composite rule split at the given polar and azimuthal break points.
    /// Each panel receives a share of the nodes proportional to its extent,
    /// but never fewer than 16.
    pub fn with_breaks(theta_breaks: &[f64], phi_breaks: &[f64], n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < MIN_AXIS_NODES || n_phi < MIN_AXIS_NODES {
            return Err(Error::InvalidArgument(format!(
                "grid resolution {n_theta} x {n_phi} below the minimum {MIN_AXIS_NODES} per axis"
            )));
        }
        let mut thetas = Vec::new();
        let mut theta_w = Vec::new();
        for w in theta_breaks.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let n = panel_nodes(n_theta, (t1 - t0) / PI, theta_breaks.len() > 2);
            // integrate in x = cos θ, which runs downward as θ increases
            let (x, wx) = gauss_legendre_interval(n, t1.cos(), t0.cos());
            for (xi, wi) in x.into_iter().zip(wx).rev() {
                thetas.push(xi.clamp(-1.0, 1.0).acos());
                theta_w.push(wi);
            }
        }
        let mut phis = Vec::new();
        let mut phi_w = Vec::new();
        if phi_breaks.len() <= 2 {
            let h = 2.0 * PI / n_phi as f64;
            for k in 0..n_phi {
                phis.push((k as f64 + 0.5) * h);
                phi_w.push(h);
            }
        } else {
            for w in phi_breaks.windows(2) {
                let n = panel_nodes(n_phi, (w[1] - w[0]) / (2.0 * PI), true);
                let (p, wp) = gauss_legendre_interval(n, w[0], w[1]);
                phis.extend(p);
                phi_w.extend(wp);
            }
        }
        let mut nodes = Vec::with_capacity(thetas.len() * phis.len());
        let mut weights = Vec::with_capacity(thetas.len() * phis.len());
        for (&t, &wt) in thetas.iter().zip(&theta_w) {
            for (&p, &wp) in phis.iter().zip(&phi_w) {
                nodes.push(SphericalAngle { theta: t, phi: p });
                weights.push(wt * wp);
            }
        }
        let grid = Self { nodes, weights };
        let sum = grid.weights.iter().sum::<f64>();
        if (sum - 4.0 * PI).abs() > 1e-10 {
            return Err(Error::Quadrature {
                residual: (sum - 4.0 * PI).abs(),
                tolerance: 1e-10,
            });
        }
        Ok(grid)
    }

    pub fn nodes(&self) -> &[SphericalAngle] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(&SphericalAngle) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(a, w)| w * f(a)).sum()
    }

    /// `‖(2j+1)/(4π) Σᵢ wᵢ |Ωᵢ⟩⟨Ωᵢ| − 1‖` (max entry).
    pub fn identity_residual(&self, spin: SpinQuantumNumber) -> f64 {
        let d = spin.dim();
        let acc = self.frame_operator(spin, |_| true);
        let id = CMat::identity(d, d);
        crate::linalg::max_abs_diff(&acc, &id)
    }

    /// Checks the resolution rule for `spin`: node count, weight sum and
    /// identity resolution.
    pub fn validate_for(&self, spin: SpinQuantumNumber) -> Result<()> {
        let needed = 2 * spin.dim() * spin.dim();
        if self.len() < needed {
            return Err(Error::Quadrature {
                residual: self.len() as f64,
                tolerance: needed as f64,
            });
        }
        let residual = self.identity_residual(spin);
        if residual > 1e-8 {
            return Err(Error::Quadrature { residual, tolerance: 1e-8 });
        }
        Ok(())
    }

    /// `(2j+1)/(4π) Σ_{i ∈ selected} wᵢ |Ωᵢ⟩⟨Ωᵢ|`.
    pub(crate) fn frame_operator(&self, spin: SpinQuantumNumber, select: impl Fn(usize) -> bool) -> CMat {
        let d = spin.dim();
        let norm = spin.dim() as f64 / (4.0 * PI);
        let mut acc = CMat::zeros(d, d);
        for (i, (a, &w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            if !select(i) {
                continue;
            }
            let z = crate::spin::make_coherent_state(spin, *a);
            let z = z.amplitudes();
            let s = c(norm * w, 0.0);
            for col in 0..d {
                let zc = z[col].conj() * s;
                for r in 0..d {
                    acc[(r, col)] += z[r] * zc;
                }
            }
        }
        acc
    }
}

fn panel_nodes(total: usize, fraction: f64, split: bool) -> usize {
    if !split {
        return total;
    }
    MIN_PANEL_NODES.max((total as f64 * fraction).ceil() as usize)
}
