//! Least-squares power-law fitting on log-log axes.

use crate::error::{Error, Result};

/// Ordinary least-squares slope of log₁₀(y) against log₁₀(x).
///
/// Requires at least three points with strictly positive coordinates.
pub fn log_log_slope<I>(points: I) -> Result<f64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut logs = Vec::new();
    for (x, y) in points {
        if !(x.is_finite() && y.is_finite() && x > 0.0 && y > 0.0) {
            return Err(Error::DegenerateInput(format!(
                "log-log fit needs positive finite values, got ({x}, {y})"
            )));
        }
        logs.push((x.log10(), y.log10()));
    }
    let n = logs.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "log-log fit needs at least 3 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (sxx, sxy) = logs.iter().fold((0.0, 0.0), |(sxx, sxy), &(lx, ly)| {
        (sxx + (lx - mx) * (lx - mx), sxy + (lx - mx) * (ly - my))
    });
    if sxx <= f64::EPSILON * f64::EPSILON * nf * (1.0 + mx * mx) {
        return Err(Error::DegenerateInput("all abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}
