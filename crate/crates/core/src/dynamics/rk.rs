//! Adaptive Dormand–Prince 5(4) stepping for matrix-valued ODEs.

use crate::error::{Error, Result};
use crate::linalg::{c, CMat};


const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_max: f64::INFINITY, max_steps: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
    pub last_step: f64,
    pub min_step: f64,
}

fn lin(terms: &[(f64, &CMat)], base: &CMat, h: f64) -> CMat {
    let mut out = base.clone();
    for (a, k) in terms {
        if *a != 0.0 {
            out.zip_apply(*k, |o, kv| *o += kv * c(a * h, 0.0));
        }
    }
    out
}

fn error_norm(err: &CMat, y0: &CMat, y1: &CMat, ctl: &StepControl) -> f64 {
    let mut s = 0.0;
    for ((e, a), b) in err.iter().zip(y0.iter()).zip(y1.iter()) {
        let sc = ctl.atol + ctl.rtol * a.norm().max(b.norm());
        s += (e.norm() / sc).powi(2);
    }
    (s / err.len() as f64).sqrt()
}

fn scaled_norm(x: &CMat, y: &CMat, ctl: &StepControl) -> f64 {
    let mut s = 0.0;
    for (v, w) in x.iter().zip(y.iter()) {
        s += (v.norm() / (ctl.atol + ctl.rtol * w.norm())).powi(2);
    }
    (s / x.len() as f64).sqrt()
}

/// Integrates `y' = f(y)` from `times[0]`, calling `observe(k, t_k, y, stats)` at
/// every requested time (including the first). Steps are clipped to land on
/// the requested times exactly.
pub fn integrate<F, O>(mut f: F, y0: CMat, times: &[f64], ctl: &StepControl, mut observe: O) -> Result<StepStats>
where
    F: FnMut(&CMat) -> CMat,
    O: FnMut(usize, f64, &CMat, &StepStats) -> Result<()>,
{
    if times.is_empty() {
        return Ok(StepStats::default());
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("time grid must be finite and strictly ascending".into()));
    }
    let mut stats = StepStats { min_step: f64::INFINITY, ..Default::default() };
    let mut t = times[0];
    let mut y = y0;
    observe(0, t, &y, &stats)?;
    if times.len() == 1 {
        return Ok(stats);
    }
    let mut k1 = f(&y);
    stats.rhs_evaluations += 1;

    // Initial step from the local scale of the solution and its derivative.
    let span = times[times.len() - 1] - times[0];
    let d0 = scaled_norm(&y, &y, ctl);
    let d1 = scaled_norm(&k1, &y, ctl);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
    h = h.min(ctl.h_max).min(span);

    for (idx, &t_target) in times.iter().enumerate().skip(1) {
        while t < t_target {
            if stats.accepted + stats.rejected >= ctl.max_steps {
                return Err(Error::Integration { time: t, reason: "step budget exhausted".into() });
            }
            let remaining = t_target - t;
            let land = h >= remaining * (1.0 - 1e-12);
            let step = if land { remaining } else { h };
            let k2 = f(&lin(&[(A21, &k1)], &y, step));
            let k3 = f(&lin(&[(A31, &k1), (A32, &k2)], &y, step));
            let k4 = f(&lin(&[(A41, &k1), (A42, &k2), (A43, &k3)], &y, step));
            let k5 = f(&lin(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &y, step));
            let k6 = f(&lin(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], &y, step));
            let y_new = lin(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], &y, step);
            let k7 = f(&y_new);
            stats.rhs_evaluations += 6;
            let zero = CMat::zeros(y.nrows(), y.ncols());
            let err = lin(&[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)], &zero, step);
            let en = error_norm(&err, &y, &y_new, ctl);
            if !en.is_finite() {
                return Err(Error::Integration { time: t, reason: "non-finite error estimate".into() });
            }
            let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            if en <= 1.0 {
                t = if land { t_target } else { t + step };
                y = y_new;
                k1 = k7;
                stats.accepted += 1;
                stats.last_step = step;
                stats.min_step = stats.min_step.min(step);
                // A step shortened to land on the grid does not shrink the next one.
                h = if land { h.max(step * factor) } else { step * factor }.min(ctl.h_max);
            } else {
                stats.rejected += 1;
                h = step * factor.min(1.0);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Integration { time: t, reason: format!("step size underflow ({h:e})") });
                }
            }
        }
        observe(idx, t, &y, &stats)?;
    }
    Ok(stats)
}
