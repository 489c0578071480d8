use crate::error::{Error, Result};
use crate::dynamics::MagnetizationHistogram;
use crate::husimi::PovmSet;
use crate::spin::{DensityMatrix, SpinQuantumNumber};

pub const DEFAULT_EPS_MID: f64 = 0.05;
pub const DEFAULT_DELTA_TRANSFER: f64 = 0.1;
/// Largest `Δt · rate` for which the witness is considered reliable.
pub const MAX_RESOLUTION: f64 = 0.1;

/// Which slots of a series are the extremal ones and which lie between.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotRoles {
    pub north: usize,
    pub south: usize,
    pub middle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotTimeSeries {
    pub times: Vec<f64>,
    pub slot_names: Vec<String>,
    /// `probabilities[t][k]`.
    pub probabilities: Vec<Vec<f64>>,
    pub roles: SlotRoles,
    /// Fastest rate of the underlying dynamics, used to judge the time resolution.
    pub dynamical_rate: Option<f64>,
}

impl SlotTimeSeries {
    pub fn new(
        times: Vec<f64>,
        slot_names: Vec<String>,
        probabilities: Vec<Vec<f64>>,
        roles: SlotRoles,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != probabilities.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: probabilities.len() });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("series times must be strictly ascending".into()));
        }
        let k = slot_names.len();
        let mut used = vec![false; k];
        for &s in [roles.north, roles.south].iter().chain(&roles.middle) {
            if s >= k || used[s] {
                return Err(Error::InvalidArgument(format!("slot role index {s} invalid or repeated")));
            }
            used[s] = true;
        }
        for (t, row) in times.iter().zip(&probabilities) {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: row.len() });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-8 || row.iter().any(|&p| p < -1e-12) {
                return Err(Error::InvalidState(format!("slot probabilities at t = {t} sum to {sum}")));
            }
        }
        Ok(Self { times, slot_names, probabilities, roles, dynamical_rate: None })
    }

    pub fn with_dynamical_rate(mut self, rate: f64) -> Self {
        self.dynamical_rate = Some(rate);
        self
    }

    /// Three-slot series from magnetization histograms: the bin holding `+j`,
    /// the bin holding `−j`, and everything else.
    pub fn from_magnetization(times: Vec<f64>, histograms: &[MagnetizationHistogram], spin: SpinQuantumNumber) -> Result<Self> {
        let rows = histograms
            .iter()
            .map(|h| {
                let n = h.edges.bin_of(spin.j()).map_or(0.0, |b| h.probabilities[b]);
                let s = h.edges.bin_of(-spin.j()).map_or(0.0, |b| h.probabilities[b]);
                let mid = h.intermediate_mass(spin);
                vec![n, mid, s]
            })
            .collect();
        Self::new(times, three_names(), rows, SlotRoles { north: 0, south: 2, middle: vec![1] })
    }

    /// Series of slot probabilities `Tr[ρ(t) P_k]`.
    pub fn from_povm(times: Vec<f64>, states: &[DensityMatrix], povm: &PovmSet, roles: SlotRoles) -> Result<Self> {
        let names = povm.partition().slots().iter().map(|s| s.name.clone()).collect();
        let rows = states.iter().map(|r| povm.probabilities(r)).collect::<Result<Vec<_>>>()?;
        Self::new(times, names, rows, roles)
    }

    pub fn middle(&self, t: usize) -> f64 {
        self.roles.middle.iter().map(|&k| self.probabilities[t][k]).sum()
    }

    pub fn south(&self, t: usize) -> f64 {
        self.probabilities[t][self.roles.south]
    }

    pub fn north(&self, t: usize) -> f64 {
        self.probabilities[t][self.roles.north]
    }

    /// `max Δt`.
    pub fn max_step(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

fn three_names() -> Vec<String> {
    vec!["north".into(), "middle".into(), "south".into()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub witness: f64,
    pub eps_mid: f64,
    pub delta_transfer: f64,
    pub violation_time: Option<f64>,
    /// Peak middle-slot occupancy over the whole series.
    pub max_middle: f64,
    /// False when the time grid is too coarse for the supplied dynamical rate.
    pub reliable: bool,
}

impl ContinuityReport {
    pub fn violation(&self) -> bool {
        self.violation_time.is_some()
    }
}

/// `W = max_t [P_S(t) − P_S(0)]` over the times before the middle slots
/// have ever reached `eps_mid`.
pub fn continuity_witness(series: &SlotTimeSeries, eps_mid: f64, delta_transfer: f64) -> Result<ContinuityReport> {
    if !(eps_mid > 0.0 && delta_transfer > 0.0) {
        return Err(Error::InvalidArgument("witness thresholds must be positive".into()));
    }
    let s0 = series.south(0);
    let mut witness: f64 = 0.0;
    let mut violation_time = None;
    let mut peak_mid: f64 = 0.0;
    let mut open = true;
    for (k, &t) in series.times.iter().enumerate() {
        let mid = series.middle(k);
        peak_mid = peak_mid.max(mid);
        if open && peak_mid >= eps_mid {
            open = false;
        }
        if open {
            let transfer = series.south(k) - s0;
            witness = witness.max(transfer);
            if violation_time.is_none() && transfer >= delta_transfer {
                violation_time = Some(t);
            }
        }
    }
    let reliable = series.dynamical_rate.map_or(true, |r| series.max_step() * r <= MAX_RESOLUTION + 1e-12);
    Ok(ContinuityReport { witness, eps_mid, delta_transfer, violation_time, max_middle: peak_mid, reliable })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(rows: Vec<[f64; 3]>) -> SlotTimeSeries {
        let times = (0..rows.len()).map(|k| k as f64).collect();
        SlotTimeSeries::new(
            times,
            three_names(),
            rows.into_iter().map(|r| r.to_vec()).collect(),
            SlotRoles { north: 0, south: 2, middle: vec![1] },
        )
        .unwrap()
    }

    #[test]
    fn static_series_has_zero_witness() {
        let r = continuity_witness(&series(vec![[1.0, 0.0, 0.0]; 5]), 0.05, 0.1).unwrap();
        assert_eq!(r.witness, 0.0);
        assert!(!r.violation());
    }

    #[test]
    fn transport_through_middle_is_continuous() {
        let rows = vec![[1.0, 0.0, 0.0], [0.6, 0.4, 0.0], [0.2, 0.4, 0.4], [0.0, 0.1, 0.9]];
        let r = continuity_witness(&series(rows), 0.05, 0.1).unwrap();
        assert!(!r.violation());
        assert_eq!(r.max_middle, 0.4);
    }

    #[test]
    fn jump_is_a_violation() {
        let rows = vec![[1.0, 0.0, 0.0], [0.8, 0.01, 0.19], [0.5, 0.0, 0.5]];
        let r = continuity_witness(&series(rows), 0.05, 0.1).unwrap();
        assert_eq!(r.violation_time, Some(1.0));
        assert!((r.witness - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coarse_grid_is_unreliable() {
        let s = series(vec![[1.0, 0.0, 0.0]; 3]).with_dynamical_rate(1.0);
        assert!(!continuity_witness(&s, 0.05, 0.1).unwrap().reliable);
        let fine = SlotTimeSeries { dynamical_rate: Some(0.1), ..s };
        assert!(continuity_witness(&fine, 0.05, 0.1).unwrap().reliable);
    }

    #[test]
    fn rows_must_be_normalized() {
        let r = SlotTimeSeries::new(
            vec![0.0],
            three_names(),
            vec![vec![0.5, 0.0, 0.0]],
            SlotRoles { north: 0, south: 2, middle: vec![1] },
        );
        assert!(r.is_err());
    }
}
