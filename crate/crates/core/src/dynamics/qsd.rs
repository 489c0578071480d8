//! Quantum-state-diffusion unraveling of the Lindblad equation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, CVec, SparseOp, C64, I};
use crate::spin::DensityMatrix;

use super::lindblad::LindbladModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QsdOptions {
    /// Upper bound on the Euler–Maruyama step; the model bound applies if smaller.
    pub max_dt: Option<f64>,
    /// Largest accepted `|mean(‖ψ‖² − 1)|` over the steps of a trajectory,
    /// measured before each renormalization. The per-step change is a
    /// zero-mean martingale for a stable step, so a systematic bias signals
    /// breakdown of the scheme.
    pub mean_drift_tolerance: f64,
    /// A single step with larger drift (or a non-finite norm) aborts at once.
    pub blowup_threshold: f64,
}

impl Default for QsdOptions {
    fn default() -> Self {
        Self { max_dt: None, mean_drift_tolerance: 1e-3, blowup_threshold: 0.5 }
    }
}

/// `min(0.01/‖H‖, 0.1/max_k ‖L_k†L_k‖)`, ignoring vanishing terms.
pub fn qsd_step_bound(model: &LindbladModel) -> f64 {
    let mut h = f64::INFINITY;
    let hn = model.hamiltonian_norm();
    if hn > 0.0 {
        h = h.min(0.01 / hn);
    }
    let dn = model.max_dissipator_norm();
    if dn > 0.0 {
        h = h.min(0.1 / dn);
    }
    h
}

/// Per-trajectory seed derived from the master seed and the trajectory index.
pub fn trajectory_seed(master_seed: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(master_seed) ^ index)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryDiagnostics {
    pub steps: usize,
    pub dt: f64,
    pub mean_norm_drift: f64,
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub seed: u64,
    pub states: Vec<CVec>,
    pub diagnostics: TrajectoryDiagnostics,
}

struct Kernel {
    h: SparseOp,
    ops: Vec<(SparseOp, SparseOp)>,
    dt_max: f64,
}

impl Kernel {
    fn new(model: &LindbladModel, opts: &QsdOptions) -> Result<Self> {
        let mut dt_max = qsd_step_bound(model);
        if let Some(m) = opts.max_dt {
            if !(m > 0.0) {
                return Err(Error::InvalidArgument(format!("max_dt must be positive, got {m}")));
            }
            dt_max = dt_max.min(m);
        }
        Ok(Self {
            h: SparseOp::from_dense(model.hamiltonian().matrix()),
            ops: model
                .lindblad_ops()
                .iter()
                .map(|l| {
                    let m = l.matrix();
                    (SparseOp::from_dense(m), SparseOp::from_dense(&(m.adjoint() * m)))
                })
                .collect(),
            dt_max,
        })
    }

    fn run(&self, psi0: &CVec, times: &[f64], seed: u64, opts: &QsdOptions) -> Result<Trajectory> {
        let d = psi0.len();
        if d != self.h.dim() {
            return Err(Error::DimensionMismatch { expected: self.h.dim(), found: d });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut psi: Vec<C64> = psi0.iter().copied().collect();
        let mut next = vec![c(0.0, 0.0); d];
        let mut hpsi = vec![c(0.0, 0.0); d];
        let mut lpsi = vec![vec![c(0.0, 0.0); d]; self.ops.len()];
        let mut ldl = vec![c(0.0, 0.0); d];
        let mut states = Vec::with_capacity(times.len());
        states.push(psi0.clone());
        let (mut steps, mut drift_sum, mut drift_max) = (0usize, 0.0, 0.0f64);
        for w in times.windows(2) {
            let span = w[1] - w[0];
            let n_sub = (span / self.dt_max).ceil().max(1.0) as usize;
            let h = span / n_sub as f64;
            let amp = (0.5 * h).sqrt();
            for _ in 0..n_sub {
                self.h.apply_into(&psi, &mut hpsi);
                for (x, hx) in next.iter_mut().zip(&hpsi) {
                    *x = -I * hx * h;
                }
                for ((l, ldl_op), lp) in self.ops.iter().zip(lpsi.iter_mut()) {
                    l.apply_into(&psi, lp);
                    ldl_op.apply_into(&psi, &mut ldl);
                    let e: C64 = psi.iter().zip(lp.iter()).map(|(a, b)| a.conj() * b).sum();
                    let n1: f64 = StandardNormal.sample(&mut rng);
                    let n2: f64 = StandardNormal.sample(&mut rng);
                    let dxi = c(n1 * amp, n2 * amp);
                    let e2 = e.norm_sqr();
                    for i in 0..d {
                        next[i] += (e.conj() * lp[i] - 0.5 * ldl[i] - 0.5 * e2 * psi[i]) * h
                            + (lp[i] - e * psi[i]) * dxi;
                    }
                }
                let mut norm2 = 0.0;
                for (x, p) in next.iter_mut().zip(&psi) {
                    *x += p;
                    norm2 += x.norm_sqr();
                }
                let drift = (norm2 - 1.0).abs();
                if !drift.is_finite() || drift > opts.blowup_threshold {
                    return Err(Error::StepInstability { time: w[0], drift, step_size: h });
                }
                drift_sum += norm2 - 1.0;
                drift_max = drift_max.max(drift);
                steps += 1;
                let inv = 1.0 / norm2.sqrt();
                for (p, x) in psi.iter_mut().zip(&next) {
                    *p = x * inv;
                }
            }
            states.push(CVec::from_column_slice(&psi));
        }
        let mean = if steps > 0 { (drift_sum / steps as f64).abs() } else { 0.0 };
        if mean > opts.mean_drift_tolerance {
            return Err(Error::StepInstability { time: times[times.len() - 1], drift: mean, step_size: self.dt_max });
        }
        Ok(Trajectory {
            seed,
            states,
            diagnostics: TrajectoryDiagnostics { steps, dt: self.dt_max, mean_norm_drift: mean, max_norm_drift: drift_max },
        })
    }
}

fn check_inputs(psi0: &CVec, times: &[f64]) -> Result<()> {
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be non-empty and strictly ascending".into()));
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("initial state has norm {}", psi0.norm())));
    }
    Ok(())
}

/// A single trajectory with an explicit seed.
pub fn qsd_trajectory(
    model: &LindbladModel,
    psi0: &CVec,
    times: &[f64],
    seed: u64,
    opts: &QsdOptions,
) -> Result<Trajectory> {
    check_inputs(psi0, times)?;
    Kernel::new(model, opts)?.run(psi0, times, seed, opts)
}

/// Trajectories `indices` of the ensemble identified by `master_seed`, in
/// index order regardless of scheduling.
pub fn simulate_trajectories(
    model: &LindbladModel,
    psi0: &CVec,
    times: &[f64],
    master_seed: u64,
    indices: std::ops::Range<u64>,
    opts: &QsdOptions,
) -> Result<Vec<Trajectory>> {
    check_inputs(psi0, times)?;
    let kernel = Kernel::new(model, opts)?;
    indices
        .into_par_iter()
        .map(|i| kernel.run(psi0, times, trajectory_seed(master_seed, i), opts))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableStats {
    pub mean: Vec<f64>,
    /// Sample standard deviation over `√M`; zero when `M = 1`.
    pub stderr: Vec<f64>,
}

impl ObservableStats {
    fn from_samples(samples: &[Vec<f64>]) -> Self {
        let m = samples.len() as f64;
        let n_t = samples[0].len();
        let mut mean = vec![0.0; n_t];
        for s in samples {
            for (a, v) in mean.iter_mut().zip(s) {
                *a += v;
            }
        }
        mean.iter_mut().for_each(|a| *a /= m);
        let stderr = (0..n_t)
            .map(|k| {
                if samples.len() < 2 {
                    return 0.0;
                }
                let var = samples.iter().map(|s| (s[k] - mean[k]).powi(2)).sum::<f64>() / (m - 1.0);
                (var / m).sqrt()
            })
            .collect();
        Self { mean, stderr }
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub n_trajectories: usize,
    pub master_seed: u64,
    pub times: Vec<f64>,
    pub mean_states: Vec<DensityMatrix>,
    pub magnetization: ObservableStats,
    /// Population of the all-up state.
    pub survival: ObservableStats,
    pub dt: f64,
    pub max_mean_norm_drift: f64,
}

impl TrajectoryEnsemble {
    pub fn from_trajectories(
        model: &LindbladModel,
        trajectories: &[Trajectory],
        times: &[f64],
        master_seed: u64,
    ) -> Result<Self> {
        if trajectories.is_empty() {
            return Err(Error::InvalidArgument("ensemble needs at least one trajectory".into()));
        }
        let d = model.dim();
        let mvals = model.magnetization_values();
        let m = trajectories.len() as f64;
        let mut mean_states = Vec::with_capacity(times.len());
        for k in 0..times.len() {
            let mut acc = CMat::zeros(d, d);
            for tr in trajectories {
                let psi = &tr.states[k];
                acc += psi * psi.adjoint();
            }
            mean_states.push(DensityMatrix::from_trusted(acc / c(m, 0.0)));
        }
        let mag: Vec<Vec<f64>> = trajectories
            .iter()
            .map(|tr| {
                tr.states
                    .iter()
                    .map(|psi| psi.iter().zip(&mvals).map(|(a, mv)| a.norm_sqr() * mv).sum())
                    .collect()
            })
            .collect();
        let surv: Vec<Vec<f64>> = trajectories
            .iter()
            .map(|tr| tr.states.iter().map(|psi| psi[0].norm_sqr()).collect())
            .collect();
        Ok(Self {
            n_trajectories: trajectories.len(),
            master_seed,
            times: times.to_vec(),
            mean_states,
            magnetization: ObservableStats::from_samples(&mag),
            survival: ObservableStats::from_samples(&surv),
            dt: trajectories[0].diagnostics.dt,
            max_mean_norm_drift: trajectories.iter().map(|t| t.diagnostics.mean_norm_drift).fold(0.0, f64::max),
        })
    }
}

pub fn ensemble_average(
    model: &LindbladModel,
    psi0: &CVec,
    times: &[f64],
    m: usize,
    master_seed: u64,
    opts: &QsdOptions,
) -> Result<TrajectoryEnsemble> {
    if m == 0 {
        return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
    }
    let trajs = simulate_trajectories(model, psi0, times, master_seed, 0..m as u64, opts)?;
    TrajectoryEnsemble::from_trajectories(model, &trajs, times, master_seed)
}
