//! Pointwise comparison of absorbing and specular transport.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::billiard::{evolve_scaled, survival_indicator, BoundaryLaw, ScaledState};
use crate::ensemble::sample_scaled_phase;
use crate::error::{Error, Result};
use crate::lattice::{reduce_coordinate, LatticeConfig, PhasePoint};
use crate::rng::substream;

/// Comparison tolerance between the two transported values.
pub const DOMINANCE_TOL: f64 = 1e-12;
const MAX_EVENTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub n_samples: usize,
    pub t: f64,
    /// Fraction of samples with specular ≥ absorbing − tolerance.
    pub fraction: f64,
    pub n_absorbed: usize,
    /// Surviving samples whose two values differ by more than the tolerance.
    pub n_survivor_mismatch: usize,
    /// Largest `absorbing − specular` seen.
    pub max_violation: f64,
}

/// Specular value `f(S_{-t}(x, v))` and absorbing value
/// `f(x − tv, v)·1{ε τ_r(x/ε, −v) > t}` at one phase point of the scaled table,
/// with the indicator.
pub fn transported_values<F>(
    state: &ScaledState,
    t: f64,
    cfg: &LatticeConfig,
    f: &F,
) -> Result<(f64, f64, bool)>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    let n = cfg.scale_inverse();
    let x = state.torus_position(n);
    let v = state.local.velocity.clone();
    let back = ScaledState {
        local: PhasePoint::new(state.local.position.clone(), v.iter().map(|c| -c).collect()),
        cell: state.cell.clone(),
    };
    // The specular law draws nothing from the stream.
    let mut rng = substream(0, 0);
    let (end, _) = evolve_scaled(&back, t, cfg, BoundaryLaw::Specular, &mut rng, MAX_EVENTS)?;
    let x_back = end.torus_position(n);
    let v_back: Vec<f64> = end.local.velocity.iter().map(|c| -c).collect();
    let specular = f(&x_back, &v_back);

    let alive = survival_indicator(t, &x, &v, cfg)?;
    let absorbing = if alive == 1 {
        let free: Vec<f64> = x
            .iter()
            .zip(&v)
            .map(|(a, b)| reduce_coordinate(a - t * b).0)
            .collect();
        f(&free, &v)
    } else {
        0.0
    };
    Ok((specular, absorbing, alive == 1))
}

/// Monte Carlo check of `T_t f ≤ S_t f` for a nonnegative `f` on the scaled
/// table `cfg` (which must carry the Boltzmann-Grad coupling).
pub fn dominance_check<F>(
    n_samples: usize,
    t: f64,
    cfg: &LatticeConfig,
    f: &F,
    seed: u64,
) -> Result<DominanceReport>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    cfg.check_coupling()?;
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("negative time {t}")));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be positive".into()));
    }
    let values: Vec<(f64, f64, bool)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let state = sample_scaled_phase(&mut rng, cfg);
            let values = transported_values(&state, t, cfg, f)?;
            if values.0 < 0.0 || values.1 < 0.0 {
                return Err(Error::InvalidInput("density must be nonnegative".into()));
            }
            Ok(values)
        })
        .collect::<Result<_>>()?;
    let mut report = DominanceReport {
        n_samples,
        t,
        fraction: 0.0,
        n_absorbed: 0,
        n_survivor_mismatch: 0,
        max_violation: f64::NEG_INFINITY,
    };
    let mut ok = 0usize;
    for &(s, a, alive) in &values {
        if s >= a - DOMINANCE_TOL {
            ok += 1;
        }
        report.max_violation = report.max_violation.max(a - s);
        if !alive {
            report.n_absorbed += 1;
        } else if (a - s).abs() > DOMINANCE_TOL {
            report.n_survivor_mismatch += 1;
        }
    }
    report.fraction = ok as f64 / n_samples as f64;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::bump::{make_bump_rho, BumpProfile};

    #[test]
    fn absorbed_sample_is_dominated() {
        // Head-on backward ray: x/ε = (0.5, 0), −v = (1, 0) hits after 0.4.
        let cfg = LatticeConfig::boltzmann_grad(2, 1.0, 10).unwrap();
        let state = ScaledState {
            local: PhasePoint::new(vec![0.5, 0.0], vec![-1.0, 0.0]),
            cell: vec![0, 0],
        };
        let f = |_: &[f64], _: &[f64]| 1.0;
        assert_eq!(transported_values(&state, 0.05, &cfg, &f).unwrap(), (1.0, 0.0, false));
        assert_eq!(transported_values(&state, 0.03, &cfg, &f).unwrap(), (1.0, 1.0, true));
    }

    #[test]
    fn surviving_sample_values_agree() {
        let cfg = LatticeConfig::boltzmann_grad(2, 1.0, 10).unwrap();
        let state = ScaledState {
            local: PhasePoint::new(vec![0.5, 0.5], vec![0.0, 1.0]),
            cell: vec![3, 7],
        };
        let f = |x: &[f64], v: &[f64]| 2.0 + (6.0 * x[0]).sin() * (4.0 * x[1]).cos() + v[1];
        let (s, a, alive) = transported_values(&state, 0.9, &cfg, &f).unwrap();
        assert!(alive);
        assert!((s - a).abs() < 1e-12, "{s} vs {a}");
    }

    #[test]
    fn random_samples_are_dominated() {
        let cfg = LatticeConfig::boltzmann_grad(2, 1.0, 16).unwrap();
        let bump = make_bump_rho(2, BumpProfile::CosineSquared, 2).unwrap();
        let f = |x: &[f64], _: &[f64]| bump.eval(x);
        let rep = dominance_check(2_000, 0.5, &cfg, &f, 1).unwrap();
        assert_eq!(rep.fraction, 1.0);
        assert_eq!(rep.n_survivor_mismatch, 0);
        assert!(rep.n_absorbed > 0);
    }

    #[test]
    fn requires_coupling() {
        let cfg = LatticeConfig::new(2, 0.1).unwrap();
        assert!(dominance_check(10, 0.5, &cfg, &|_: &[f64], _: &[f64]| 1.0, 0).is_err());
    }
}
