use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::husimi::{q_distribution, PovmSet, SphereGrid};
use crate::linalg::{c, CMat};
use crate::spin::DensityMatrix;

use super::channel::Channel;

/// Default tolerance on the total-variation distance.
pub const DEFAULT_MR_EPSILON: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Satisfied => "satisfied",
            Self::Violated => "violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub t_i: f64,
    pub t_j: f64,
    /// `½ ∫ |Q_lhs − Q_rhs| d²Ω`.
    pub delta: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MRReport {
    pub pairs: Vec<PairResult>,
    pub epsilon: f64,
    pub verdict: Verdict,
    /// Outcomes skipped because they were unreachable.
    pub notes: Vec<String>,
}

impl MRReport {
    pub fn max_delta(&self) -> f64 {
        self.pairs.iter().map(|p| p.delta).fold(0.0, f64::max)
    }
}

/// `n` logarithmically spaced times over `[0.1/ν, 5/ν]`.
pub fn default_pair_times(nu: f64, n: usize) -> Result<Vec<f64>> {
    if !(nu > 0.0 && nu.is_finite()) || n < 2 {
        return Err(Error::InvalidArgument("need nu > 0 and at least two times".into()));
    }
    let (a, b) = ((0.1 / nu).ln(), (5.0 / nu).ln());
    Ok((0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect())
}

/// All ordered pairs `t_i < t_j` of the given times, after aligning them to
/// the channel's resolution and removing duplicates.
pub fn ordered_pairs(channel: &dyn Channel, times: &[f64]) -> Vec<(f64, f64)> {
    let mut ts: Vec<f64> = times.iter().map(|&t| channel.align(t)).collect();
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let mut pairs = Vec::new();
    for (i, &a) in ts.iter().enumerate() {
        for &b in &ts[i + 1..] {
            pairs.push((a, b));
        }
    }
    pairs
}

fn check_pair(
    channel: &dyn Channel,
    rho0: &DensityMatrix,
    povm: &PovmSet,
    grid: &SphereGrid,
    t_i: f64,
    t_j: f64,
) -> Result<(f64, Vec<String>)> {
    let lhs = channel.evolve(rho0, t_j)?;
    let at_i = channel.evolve(rho0, t_i)?;
    let d = rho0.dim();
    let mut rhs = CMat::zeros(d, d);
    let mut notes = Vec::new();
    for k in 0..povm.len() {
        match povm.kraus_reduce(&at_i, k) {
            Ok(red) => {
                let evolved = channel.evolve(&red.state, t_j - t_i)?;
                rhs += evolved.matrix() * c(red.probability, 0.0);
            }
            Err(Error::UnreachableOutcome { slot, probability }) => notes.push(format!(
                "t_i = {t_i}: slot {slot} skipped (probability {probability:.3e})"
            )),
            Err(e) => return Err(e),
        }
    }
    let rhs = DensityMatrix::new(crate::linalg::hermitian_part(&rhs))?;
    let q_l = q_distribution(&lhs, grid)?;
    let q_r = q_distribution(&rhs, grid)?;
    Ok((q_l.total_variation(&q_r)?.clamp(0.0, 1.0), notes))
}

/// Compares `Q(Ω, t_j)` with the measured-at-`t_i` mixture
/// `Σ_k w_k Q_k(Ω, t_j)` for each pair.
pub fn mr_condition_check(
    channel: &dyn Channel,
    rho0: &DensityMatrix,
    povm: &PovmSet,
    pairs: &[(f64, f64)],
    grid: &SphereGrid,
    epsilon: f64,
) -> Result<MRReport> {
    if rho0.dim() != channel.spin().dim() {
        return Err(Error::DimensionMismatch { expected: channel.spin().dim(), found: rho0.dim() });
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be non-negative, got {epsilon}")));
    }
    if let Some(&(a, b)) = pairs.iter().find(|(a, b)| !(*a >= 0.0 && b >= a)) {
        return Err(Error::InvalidArgument(format!("invalid pair ({a}, {b}): need 0 <= t_i <= t_j")));
    }
    let results: Vec<(f64, Vec<String>)> = pairs
        .par_iter()
        .map(|&(a, b)| check_pair(channel, rho0, povm, grid, a, b))
        .collect::<Result<_>>()?;
    let mut notes = Vec::new();
    let pairs: Vec<PairResult> = pairs
        .iter()
        .zip(results)
        .map(|(&(t_i, t_j), (delta, n))| {
            notes.extend(n);
            let verdict = if delta <= epsilon { Verdict::Satisfied } else { Verdict::Violated };
            PairResult { t_i, t_j, delta, verdict }
        })
        .collect();
    let verdict = if pairs.iter().all(|p| p.verdict == Verdict::Satisfied) {
        Verdict::Satisfied
    } else {
        Verdict::Violated
    };
    Ok(MRReport { pairs, epsilon, verdict, notes })
}
