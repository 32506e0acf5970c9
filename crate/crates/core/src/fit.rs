use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through `(ln t, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
}

impl LogLogFit {
    /// The fitted constant `C` in `value ≈ C · t^slope`.
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(&(t, v)) = points.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0)) {
        return Err(Error::NonPositiveData(t, v));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(t, v)| (t.ln(), v.ln())).collect();
    let (slope, intercept) = least_squares(&logs);
    let max_residual = logs.iter().map(|(x, y)| (y - slope * x - intercept).abs()).fold(0.0, f64::max);
    Ok(LogLogFit { slope, intercept, max_residual })
}

/// Ordinary least squares `y ≈ slope · x + intercept` on centred data.
pub(crate) fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
