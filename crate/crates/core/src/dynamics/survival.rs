use crate::error::{Error, Result};

/// North-state survival probability `A(t)` on an ascending time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl SurvivalSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: values.len() });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("survival times must be strictly ascending".into()));
        }
        if let Some(v) = values.iter().find(|v| !(-1e-9..=1.0 + 1e-9).contains(*v)) {
            return Err(Error::OutOfRange(format!("survival probability {v} outside [0, 1]")));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `a(t) = 2A(t) − 1`.
    pub fn contrast(&self) -> Vec<f64> {
        self.values.iter().map(|a| 2.0 * a - 1.0).collect()
    }

    /// Restriction to `t ≤ t_max`.
    pub fn truncated(&self, t_max: f64) -> Self {
        let n = self.times.iter().take_while(|&&t| t <= t_max).count();
        Self {
            times: self.times[..n].to_vec(),
            values: self.values[..n].to_vec(),
        }
    }
}

/// Least-squares fit of `ln(2A − 1) = b − νt`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub nu: f64,
    pub intercept: f64,
    /// RMS residual of the log-linear fit.
    pub rms_residual: f64,
    /// `max |A(t) − ½(1 + e^{−νt})|` over the fitted points.
    pub max_abs_error: f64,
    pub points: usize,
}

impl DecayFit {
    pub fn model(&self, t: f64) -> f64 {
        0.5 * (1.0 + (-self.nu * t).exp())
    }
}

pub const MIN_FIT_POINTS: usize = 5;

pub fn fit_decay_rate(series: &SurvivalSeries) -> Result<DecayFit> {
    let n = series.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::FitRejected(format!("{n} points, need at least {MIN_FIT_POINTS}")));
    }
    if let Some((t, a)) = series.times.iter().zip(&series.values).find(|(_, &a)| a <= 0.5) {
        return Err(Error::FitRejected(format!(
            "A({t}) = {a} is not above 1/2, so ln(2A - 1) is undefined"
        )));
    }
    if let Some(w) = series.values.windows(2).position(|w| w[1] > w[0] + 1e-12) {
        return Err(Error::FitRejected(format!(
            "series is not monotonically decaying (increase at t = {})",
            series.times[w + 1]
        )));
    }
    let ys: Vec<f64> = series.values.iter().map(|a| (2.0 * a - 1.0).min(1.0).ln()).collect();
    let ts = &series.times;
    let nf = n as f64;
    let t_mean = ts.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = ts.iter().map(|t| (t - t_mean).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - t_mean) * (y - y_mean)).sum();
    if sxx <= 0.0 {
        return Err(Error::FitRejected("all samples at the same time".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * t_mean;
    let nu = -slope;
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::FitRejected(format!("no decay: fitted rate {nu}")));
    }
    let rms_residual = (ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - (intercept + slope * t)).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    let fit = DecayFit { nu, intercept, rms_residual, max_abs_error: 0.0, points: n };
    let max_abs_error = ts
        .iter()
        .zip(&series.values)
        .map(|(&t, a)| (a - fit.model(t)).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit { max_abs_error, ..fit })
}
