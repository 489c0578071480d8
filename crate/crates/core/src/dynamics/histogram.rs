use crate::error::{Error, Result};
use crate::spin::{DensityMatrix, SpinQuantumNumber};

/// Ascending bin edges over `m_z`. Bins are `[lo, hi)` except the last,
/// which is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct BinEdges(Vec<f64>);

impl BinEdges {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("bin edges must be at least two strictly ascending values".into()));
        }
        Ok(Self(edges))
    }

    /// One bin per eigenvalue `m`, centred on it.
    pub fn unit(spin: SpinQuantumNumber) -> Self {
        let j = spin.j();
        Self((0..=spin.dim()).map(|k| -j - 0.5 + k as f64).collect())
    }

    /// Three bins: south `[−j−½, −j+½)`, intermediate, north `[j−½, j+½]`.
    pub fn poles_and_middle(spin: SpinQuantumNumber) -> Self {
        let j = spin.j();
        if spin.twice_j() == 0 {
            return Self(vec![-0.5, 0.5]);
        }
        Self(vec![-j - 0.5, -j + 0.5, j - 0.5, j + 0.5])
    }

    pub fn edges(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bin_of(&self, m: f64) -> Option<usize> {
        let e = &self.0;
        if m < e[0] || m > e[e.len() - 1] {
            return None;
        }
        Some(e.partition_point(|&x| x <= m).saturating_sub(1).min(self.len() - 1))
    }

    fn covers(&self, spin: SpinQuantumNumber) -> bool {
        self.0[0] <= -spin.j() && self.0[self.0.len() - 1] >= spin.j()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationHistogram {
    pub edges: BinEdges,
    pub probabilities: Vec<f64>,
}

impl MagnetizationHistogram {
    /// Mass in bins containing neither `+j` nor `−j`.
    pub fn intermediate_mass(&self, spin: SpinQuantumNumber) -> f64 {
        let n = self.edges.bin_of(spin.j());
        let s = self.edges.bin_of(-spin.j());
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != n && Some(*k) != s)
            .map(|(_, p)| p)
            .sum()
    }
}

fn histogram(values: impl Iterator<Item = (f64, f64)>, spin: SpinQuantumNumber, edges: &BinEdges) -> Result<MagnetizationHistogram> {
    if !edges.covers(spin) {
        return Err(Error::InvalidArgument(format!("bins do not cover [-{0}, {0}]", spin.j())));
    }
    let mut p = vec![0.0; edges.len()];
    let mut total = 0.0;
    for (m, w) in values {
        let w = w.max(0.0);
        p[edges.bin_of(m).expect("covered")] += w;
        total += w;
    }
    if !(total > 0.0) {
        return Err(Error::InvalidState("state has no population".into()));
    }
    p.iter_mut().for_each(|x| *x /= total);
    Ok(MagnetizationHistogram { edges: edges.clone(), probabilities: p })
}

/// Magnetization distribution of a Dicke-space state.
pub fn magnetization_distribution(rho: &DensityMatrix, edges: &BinEdges) -> Result<MagnetizationHistogram> {
    let spin = SpinQuantumNumber::from_twice(rho.dim().saturating_sub(1) as u32)?;
    histogram((0..rho.dim()).map(|i| (spin.m(i), rho.population(i))), spin, edges)
}

/// Magnetization distribution of an `n`-qubit product-space state.
pub fn magnetization_distribution_full(rho: &DensityMatrix, n_qubits: usize, edges: &BinEdges) -> Result<MagnetizationHistogram> {
    if rho.dim() != 1usize << n_qubits {
        return Err(Error::DimensionMismatch { expected: 1 << n_qubits, found: rho.dim() });
    }
    let spin = SpinQuantumNumber::from_qubits(n_qubits)?;
    let half = 0.5 * n_qubits as f64;
    histogram(
        (0..rho.dim()).map(|x: usize| (half - x.count_ones() as f64, rho.population(x))),
        spin,
        edges,
    )
}
