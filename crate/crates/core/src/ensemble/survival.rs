//! Empirical free-path survival curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::billiard::first_hit;
use crate::ensemble::sampling::sample_mu_r;
use crate::error::{Error, Result};
use crate::lattice::LatticeConfig;
use crate::rng::substream;
use crate::stats::binomial_std_err;

/// Which obstacle model produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveModel {
    Periodic,
    Poisson { intensity: f64 },
    Synthetic,
}

/// Empirical `Φ(t) = P(τ > t)` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub std_err: Vec<f64>,
    pub n_samples: usize,
    pub t_max: f64,
    pub dimension: usize,
    pub radius: f64,
    pub seed: u64,
    pub censored_fraction: f64,
    pub model: CurveModel,
}

impl SurvivalCurve {
    /// Curve from known values, used for checks against closed forms.
    pub fn synthetic(times: Vec<f64>, survival: Vec<f64>, dimension: usize, radius: f64) -> Self {
        let t_max = times.last().copied().unwrap_or(0.0);
        let std_err = vec![0.0; times.len()];
        SurvivalCurve {
            times,
            survival,
            std_err,
            n_samples: 0,
            t_max,
            dimension,
            radius,
            seed: 0,
            censored_fraction: 0.0,
            model: CurveModel::Synthetic,
        }
    }

    /// `1 / r^{D-1}`.
    pub fn tail_threshold(&self) -> f64 {
        self.radius.powi(self.dimension as i32 - 1).recip()
    }

    /// Value at grid time `t` (exact match).
    pub fn value_at(&self, t: f64) -> Option<(f64, f64)> {
        self.times
            .iter()
            .position(|&s| s == t)
            .map(|i| (self.survival[i], self.std_err[i]))
    }
}

pub(crate) fn check_grid(t_grid: &[f64], t_max: f64) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidInput("time grid must be finite and nonnegative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time grid must be strictly ascending".into()));
    }
    if !(t_max >= t_grid[t_grid.len() - 1]) {
        return Err(Error::InvalidInput(format!(
            "t_max {t_max} below the last grid time {}",
            t_grid[t_grid.len() - 1]
        )));
    }
    Ok(())
}

/// Fractions `#{τ_i > t} / n` for each grid time; `taus` may contain `+inf`.
pub fn survival_from_samples(taus: &mut [f64], t_grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
    taus.sort_by(|a, b| a.total_cmp(b));
    let n = taus.len();
    let mut survival = Vec::with_capacity(t_grid.len());
    let mut std_err = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let at_most = taus.partition_point(|&tau| tau <= t);
        let p = (n - at_most) as f64 / n as f64;
        survival.push(p);
        std_err.push(binomial_std_err(p, n));
    }
    (survival, std_err)
}

/// Monte Carlo estimate of the free-path survival function under `μ_r`.
///
/// Sample `i` uses stream `i` of `seed`, so the curve is a pure function of
/// the arguments. Rays are censored at `t_max >= max(t_grid)`, which leaves
/// every grid value exact.
pub fn estimate_survival(
    cfg: &LatticeConfig,
    n_samples: usize,
    t_grid: &[f64],
    t_max: f64,
    seed: u64,
) -> Result<SurvivalCurve> {
    check_grid(t_grid, t_max)?;
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be positive".into()));
    }
    let mut taus: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let p = sample_mu_r(&mut rng, cfg);
            first_hit(&p.position, &p.velocity, cfg, t_max).map(|r| r.tau_or_inf())
        })
        .collect::<Result<_>>()?;
    let censored = taus.iter().filter(|t| t.is_infinite()).count();
    let (survival, std_err) = survival_from_samples(&mut taus, t_grid);
    Ok(SurvivalCurve {
        times: t_grid.to_vec(),
        survival,
        std_err,
        n_samples,
        t_max,
        dimension: cfg.dimension(),
        radius: cfg.radius(),
        seed,
        censored_fraction: censored as f64 / n_samples as f64,
        model: CurveModel::Periodic,
    })
}

/// `count` geometrically spaced times from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && count >= 2) {
        return Err(Error::InvalidInput(format!(
            "geometric grid needs 0 < lo < hi and count >= 2, got {lo}, {hi}, {count}"
        )));
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| lo * (ratio * i as f64).exp()).collect();
    grid[0] = lo;
    grid[count - 1] = hi;
    Ok(grid)
}

/// `count` evenly spaced times from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(hi > lo && count >= 2) {
        return Err(Error::InvalidInput(format!(
            "linear grid needs lo < hi and count >= 2, got {lo}, {hi}, {count}"
        )));
    }
    let step = (hi - lo) / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
    grid[count - 1] = hi;
    Ok(grid)
}
