//! Power-law fitting for scaling analyses (gap vs. N, squeezing vs. time).

use crate::{Error, Result};

/// Result of a least-squares fit of log y against log x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Exponent of y ∝ x^slope.
    pub slope: f64,
    /// Intercept in log space: log y = slope·log x + intercept.
    pub intercept: f64,
    /// RMS of the log-space residuals.
    pub residual: f64,
    /// Number of points inside the fit window.
    pub n_points: usize,
}

/// Unweighted least squares on (log x, log y) over the window x ∈ [lo, hi].
///
/// Requires at least 3 in-window points, all with x > 0 and y > 0.
pub fn fit_power_law(pairs: &[(f64, f64)], window: (f64, f64)) -> Result<PowerLawFit> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "empty fit window [{lo}, {hi}]"
        )));
    }
    let mut logs = Vec::new();
    for &(x, y) in pairs {
        if x < lo || x > hi {
            continue;
        }
        if x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!(
                "power-law fit requires positive finite data, got ({x}, {y})"
            )));
        }
        logs.push((x.ln(), y.ln()));
    }
    if logs.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "power-law fit needs at least 3 points in the window, got {}",
            logs.len()
        )));
    }

    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();

    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::Domain(
            "power-law fit degenerate: all x identical".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;

    let ss: f64 = logs
        .iter()
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let residual = (ss / n).sqrt();

    Ok(PowerLawFit {
        slope,
        intercept,
        residual,
        n_points: logs.len(),
    })
}
