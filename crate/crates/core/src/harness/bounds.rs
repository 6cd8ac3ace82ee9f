//! The two sides of the non-convergence inequality and their crossing time.

use crate::error::{Error, Result};
use crate::harness::bump::BumpInitialData;

/// `C1 / (t r_*^{D-1}) · ‖ρ‖₂`, valid for `t > 1 / r_*^{D-1}`.
pub fn lower_bound_from_norm(t: f64, c1: f64, r_star: f64, rho_l2: f64, dimension: usize) -> Result<f64> {
    if !(c1 > 0.0 && r_star > 0.0) {
        return Err(Error::InvalidInput(format!(
            "C1 and r_star must be positive, got {c1} and {r_star}"
        )));
    }
    let scale = r_star.powi(dimension as i32 - 1);
    let threshold = 1.0 / scale;
    if !(t > threshold) {
        return Err(Error::BelowThreshold { t, threshold });
    }
    Ok(c1 / (t * scale) * rho_l2)
}

pub fn lower_bound_l(t: f64, c1: f64, r_star: f64, data: &BumpInitialData, dimension: usize) -> Result<f64> {
    lower_bound_from_norm(t, c1, r_star, data.rho_l2, dimension)
}

/// `‖ρ‖₁ + c e^{-γt} ‖ρ‖₂`.
pub fn upper_bound_from_norms(t: f64, c: f64, gamma: f64, rho_l1: f64, rho_l2: f64) -> f64 {
    rho_l1 + c * (-gamma * t).exp() * rho_l2
}

pub fn upper_bound_u(t: f64, c: f64, gamma: f64, data: &BumpInitialData) -> f64 {
    upper_bound_from_norms(t, c, gamma, data.rho_l1, data.rho_l2)
}

/// Largest root of `g(t) = C1 e^{γt} − c r_*^{D-1} t`, or `None` when `g > 0`
/// on `[0, ∞)`.
///
/// `g` is strictly convex with minimum at `t₀ = ln(K)/γ`, `K = c r_*^{D-1}/(C1 γ)`,
/// and `min g = (c r_*^{D-1}/γ)(1 − ln K)`; a root exists iff `K ≥ e`. At
/// tangency (within `1e-12` relative) `t₀` is returned.
pub fn contradiction_time(c1: f64, c: f64, gamma: f64, r_star: f64, dimension: usize) -> Option<f64> {
    let slope = c * r_star.powi(dimension as i32 - 1);
    let g = |t: f64| c1 * (gamma * t).exp() - slope * t;
    let k = slope / (c1 * gamma);
    let e = std::f64::consts::E;
    if !(k.is_finite() && k > 0.0) || k < e * (1.0 - 1e-12) {
        return None;
    }
    let t0 = k.ln() / gamma;
    if k <= e * (1.0 + 1e-12) {
        return Some(t0);
    }
    let mut step = t0.abs().max(1.0 / gamma);
    let mut hi = t0 + step;
    while g(hi) <= 0.0 {
        step *= 2.0;
        hi = t0 + step;
    }
    let mut lo = t0;
    while hi - lo > 1e-10 * hi.abs().max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
