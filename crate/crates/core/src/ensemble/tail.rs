//! Tail diagnostics: the `t r^{D-1} Φ(t)` envelope and power-law versus
//! exponential fits.

use serde::{Deserialize, Serialize};

use crate::ensemble::survival::SurvivalCurve;
use crate::error::{Error, Result};
use crate::stats::fit_line;

/// Half-open time window `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidInput(format!("bad window ({lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t <= self.hi
    }

    /// Default tail window `(2/r^{D-1}, 20/r^{D-1}]`.
    pub fn default_tail(dimension: usize, radius: f64) -> Self {
        let base = radius.powi(dimension as i32 - 1).recip();
        Window {
            lo: 2.0 * base,
            hi: 20.0 * base,
        }
    }
}

/// Empirical surrogates of the two tail constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundsEstimate {
    pub window: Window,
    /// `min t r^{D-1} Φ(t)` over grid points in the window.
    pub c_low: f64,
    /// `max t r^{D-1} Φ(t)` over the same points.
    pub c_high: f64,
    /// `c_high / c_low` (`+inf` when `c_low = 0`).
    pub spread: f64,
    pub n_points: usize,
}

/// Extremes of `t r^{D-1} Φ(t)` over the grid points inside `window`.
pub fn check_bgw_bounds(curve: &SurvivalCurve, window: Window) -> Result<TailBoundsEstimate> {
    let threshold = curve.tail_threshold();
    if window.lo < threshold {
        return Err(Error::BelowThreshold {
            t: window.lo,
            threshold,
        });
    }
    if window.hi > curve.t_max {
        return Err(Error::InvalidInput(format!(
            "window end {} beyond censoring horizon {}",
            window.hi, curve.t_max
        )));
    }
    let scale = curve.radius.powi(curve.dimension as i32 - 1);
    let products: Vec<f64> = curve
        .times
        .iter()
        .zip(&curve.survival)
        .filter(|(t, _)| window.contains(**t))
        .map(|(t, s)| t * scale * s)
        .collect();
    if products.is_empty() {
        return Err(Error::EmptyWindow {
            lo: window.lo,
            hi: window.hi,
        });
    }
    let c_low = products.iter().copied().fold(f64::INFINITY, f64::min);
    let c_high = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = if c_low > 0.0 { c_high / c_low } else { f64::INFINITY };
    Ok(TailBoundsEstimate {
        window,
        c_low,
        c_high,
        spread,
        n_points: products.len(),
    })
}

/// Competing tail models fitted by least squares in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    /// Slope of `log Φ` against `log t`.
    pub power_exponent: f64,
    pub power_r2: f64,
    /// Minus the slope of `log Φ` against `t`.
    pub exp_rate: f64,
    pub exp_r2: f64,
    pub window: Window,
    pub n_points: usize,
}

pub fn fit_tail_models(curve: &SurvivalCurve, window: Window) -> Result<ModelFit> {
    let (t, s): (Vec<f64>, Vec<f64>) = curve
        .times
        .iter()
        .zip(&curve.survival)
        .filter(|(t, s)| window.contains(**t) && **t <= curve.t_max && **s > 0.0)
        .map(|(t, s)| (*t, *s))
        .unzip();
    if t.len() < 5 {
        return Err(Error::DegenerateFit(format!(
            "need at least 5 positive points in the window, found {}",
            t.len()
        )));
    }
    if s.iter().all(|v| *v == s[0]) {
        return Err(Error::DegenerateFit("survival is constant on the window".into()));
    }
    let log_s: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let log_t: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let power = fit_line(&log_t, &log_s)?;
    let expo = fit_line(&t, &log_s)?;
    Ok(ModelFit {
        power_exponent: power.slope,
        power_r2: power.r2,
        exp_rate: -expo.slope,
        exp_r2: expo.r2,
        window,
        n_points: t.len(),
    })
}
