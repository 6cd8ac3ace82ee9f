use rand::Rng;

use crate::billiard::ScaledState;
use crate::lattice::{LatticeConfig, PhasePoint};
use crate::rng::{uniform_cell_point, uniform_direction};

/// Draws from `μ_r`: position uniform on the punctured cell, velocity uniform
/// on the sphere.
pub fn sample_mu_r<R: Rng + ?Sized>(rng: &mut R, cfg: &LatticeConfig) -> PhasePoint {
    sample_mu_r_counted(rng, cfg).0
}

/// Same as [`sample_mu_r`], also returning the number of position proposals used.
pub fn sample_mu_r_counted<R: Rng + ?Sized>(rng: &mut R, cfg: &LatticeConfig) -> (PhasePoint, u64) {
    let d = cfg.dimension();
    let r2 = cfg.radius() * cfg.radius();
    let mut attempts = 0;
    let position = loop {
        attempts += 1;
        let x = uniform_cell_point(rng, d);
        if x.iter().map(|c| c * c).sum::<f64>() >= r2 {
            break x;
        }
    };
    (PhasePoint::new(position, uniform_direction(rng, d)), attempts)
}

/// Uniform phase point on the scaled free domain: a `μ_r` draw placed in a
/// uniformly chosen cell of the `n^D` copies.
pub fn sample_scaled_phase<R: Rng + ?Sized>(rng: &mut R, cfg: &LatticeConfig) -> ScaledState {
    let n = cfg.scale_inverse();
    let local = sample_mu_r(rng, cfg);
    let cell = (0..cfg.dimension())
        .map(|_| rng.random_range(0..n) as i64)
        .collect();
    ScaledState { local, cell }
}
