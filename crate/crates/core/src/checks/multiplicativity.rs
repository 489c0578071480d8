use crate::error::{Error, Result};

fn contrast(a: &impl Fn(f64) -> f64, t: f64) -> Result<f64> {
    let v = a(t);
    if !(-1.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange(format!("a({t}) = {v} outside [-1, 1]")));
    }
    Ok(v)
}

/// `|a(t_j) − a(t_i) a(t_j − t_i)| / 2`.
pub fn two_state_mr_check(a: impl Fn(f64) -> f64, t_i: f64, t_j: f64) -> Result<f64> {
    if !(t_i >= 0.0 && t_j > t_i) {
        return Err(Error::InvalidArgument(format!("need 0 <= t_i < t_j, got ({t_i}, {t_j})")));
    }
    let (aj, ai, ad) = (contrast(&a, t_j)?, contrast(&a, t_i)?, contrast(&a, t_j - t_i)?);
    Ok((aj - ai * ad).abs() / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanResult {
    pub max_mismatch: f64,
    pub worst_pair: (f64, f64),
}

/// Largest two-state mismatch over all ordered pairs of grid times.
pub fn multiplicativity_scan(a: impl Fn(f64) -> f64, times: &[f64]) -> Result<ScanResult> {
    if times.len() < 3 {
        return Err(Error::InvalidArgument("multiplicativity scan needs at least 3 times".into()));
    }
    let mut best = ScanResult { max_mismatch: 0.0, worst_pair: (times[0], times[1]) };
    for (i, &ti) in times.iter().enumerate() {
        for &tj in &times[i + 1..] {
            let (lo, hi) = if ti < tj { (ti, tj) } else { (tj, ti) };
            if lo == hi {
                continue;
            }
            let m = two_state_mr_check(&a, lo, hi)?;
            if m > best.max_mismatch {
                best = ScanResult { max_mismatch: m, worst_pair: (lo, hi) };
            }
        }
    }
    Ok(best)
}
