//! Exponential fits `c e^{-γt}` to relaxation traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::fit_line;

/// Distances at or below this level are treated as rounding noise.
pub const DISTANCE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c_fit: f64,
    pub gamma_fit: f64,
    /// RMS residual of the fit in `log` distance.
    pub residual: f64,
    pub window: (f64, f64),
}

/// Least squares on `(t, ln d)` over points with `t` in the closed `window`
/// (all points when `None`) and `d > DISTANCE_FLOOR`.
pub fn fit_decay(t: &[f64], d: &[f64], window: Option<(f64, f64)>) -> Result<DecayFit> {
    if t.len() != d.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} times but {} distances",
            t.len(),
            d.len()
        )));
    }
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let (ts, logs): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(d)
        .filter(|(t, d)| **t >= lo && **t <= hi && **d > DISTANCE_FLOOR)
        .map(|(t, d)| (*t, d.ln()))
        .unzip();
    if ts.len() < 5 {
        return Err(Error::DegenerateFit(format!(
            "need at least 5 points above the rounding floor, found {}",
            ts.len()
        )));
    }
    let fit = fit_line(&ts, &logs)?;
    if !(fit.slope < 0.0) {
        return Err(Error::DegenerateFit(format!(
            "no decay in the window (slope {:.3e})",
            fit.slope
        )));
    }
    let used = (ts[0], ts[ts.len() - 1]);
    Ok(DecayFit {
        c_fit: fit.intercept.exp(),
        gamma_fit: -fit.slope,
        residual: fit.rms_residual,
        window: window.unwrap_or(used),
    })
}
