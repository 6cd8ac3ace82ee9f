//! Free paths among Poisson-distributed spherical obstacles.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::ensemble::survival::{check_grid, survival_from_samples, CurveModel, SurvivalCurve};
use crate::error::{Error, Result};
use crate::lattice::unit_ball_volume;
use crate::rng::substream;

/// Intensity whose mean free path matches the periodic table of radius `r`:
/// `λ = 1 / (1 − ω_D r^D)`.
pub fn matched_poisson_intensity(dimension: usize, radius: f64) -> f64 {
    1.0 / (1.0 - unit_ball_volume(dimension) * radius.powi(dimension as i32))
}

/// Exponential rate `λ ω_{D-1} r^{D-1}` of the Poisson free path (`2rλ` in 2D).
pub fn poisson_decay_rate(intensity: f64, dimension: usize, radius: f64) -> f64 {
    intensity * unit_ball_volume(dimension - 1) * radius.powi(dimension as i32 - 1)
}

/// First-hit time of the ray from the origin along `e_1` among centres drawn
/// in the box `[-r, t_max + r] × [-r, r]^{D-1}`; centres covering the origin
/// are discarded, which conditions the start point to be free.
fn poisson_free_path<R: Rng + ?Sized>(
    rng: &mut R,
    counts: &Poisson<f64>,
    dimension: usize,
    radius: f64,
    t_max: f64,
) -> f64 {
    let r2 = radius * radius;
    let count = counts.sample(rng) as u64;
    let mut best = f64::INFINITY;
    let mut centre = [0.0; 8];
    for _ in 0..count {
        centre[0] = -radius + rng.random::<f64>() * (t_max + 2.0 * radius);
        for c in centre.iter_mut().take(dimension).skip(1) {
            *c = radius * (2.0 * rng.random::<f64>() - 1.0);
        }
        let perp2: f64 = centre[1..dimension].iter().map(|c| c * c).sum();
        if perp2 >= r2 || centre[0] * centre[0] + perp2 < r2 || centre[0] <= 0.0 {
            continue;
        }
        let tau = centre[0] - (r2 - perp2).sqrt();
        if tau < best {
            best = tau;
        }
    }
    if best <= t_max {
        best
    } else {
        f64::INFINITY
    }
}

/// Monte Carlo survival curve of the free path among Poisson obstacles.
///
/// Rays are censored at the last grid time. The exact answer is
/// `exp(-poisson_decay_rate(λ, D, r)·t)`.
pub fn poisson_survival(
    intensity: f64,
    radius: f64,
    dimension: usize,
    n_samples: usize,
    t_grid: &[f64],
    seed: u64,
) -> Result<SurvivalCurve> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(Error::InvalidInput(format!("intensity must be positive, got {intensity}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    if !(2..=8).contains(&dimension) {
        return Err(Error::InvalidInput(format!("unsupported dimension {dimension}")));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be positive".into()));
    }
    let t_max = t_grid.last().copied().unwrap_or(0.0);
    check_grid(t_grid, t_max)?;
    let volume = (t_max + 2.0 * radius) * (2.0 * radius).powi(dimension as i32 - 1);
    let counts = Poisson::new(intensity * volume)
        .map_err(|e| Error::InvalidInput(format!("Poisson mean: {e}")))?;
    let mut taus: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            poisson_free_path(&mut rng, &counts, dimension, radius, t_max)
        })
        .collect();
    let censored = taus.iter().filter(|t| t.is_infinite()).count();
    let (survival, std_err) = survival_from_samples(&mut taus, t_grid);
    Ok(SurvivalCurve {
        times: t_grid.to_vec(),
        survival,
        std_err,
        n_samples,
        t_max,
        dimension,
        radius,
        seed,
        censored_fraction: censored as f64 / n_samples as f64,
        model: CurveModel::Poisson { intensity },
    })
}
