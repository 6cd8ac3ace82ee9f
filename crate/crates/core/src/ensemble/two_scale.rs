//! Fourier test for fields oscillating on the obstacle scale.
//!
//! A field `u(x) = U(n x, ·)` with `U` 1-periodic only carries Fourier modes
//! `k ≡ 0 (mod n)`. The check samples `u` on a uniform `G^D` grid of the unit
//! torus, takes the discrete Fourier transform and reports how much energy
//! sits outside that lattice of modes.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::billiard::first_hit;
use crate::error::{Error, Result};
use crate::lattice::{distance_to_lattice, reduce_to_cell, LatticeConfig};

/// Summary of the discrete Fourier coefficients of `u` on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoScaleReport {
    pub n: usize,
    pub grid: usize,
    pub dimension: usize,
    /// `Σ |c_k|²` over modes with every `k_i ≡ 0 (mod n)`.
    pub aligned_energy: f64,
    /// `Σ |c_k|²` over the remaining modes.
    pub off_energy: f64,
    pub max_aligned_magnitude: f64,
    pub max_off_magnitude: f64,
    /// `off_energy / (aligned_energy + off_energy)`, zero for a vanishing field.
    pub relative_off_mass: f64,
    /// Modes with magnitude above `1e-12`, as (frequency, magnitude).
    pub significant_modes: Vec<(Vec<i64>, f64)>,
}

/// In-place separable FFT of a `G^D` array stored in row-major order.
fn fft_nd(data: &mut [Complex64], grid: usize, dimension: usize) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(grid);
    let mut line = vec![Complex64::new(0.0, 0.0); grid];
    for axis in 0..dimension {
        let stride = grid.pow((dimension - 1 - axis) as u32);
        let block = stride * grid;
        for start in 0..data.len() / grid {
            let outer = start / stride;
            let inner = start % stride;
            let base = outer * block + inner;
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            fft.process(&mut line);
            for (j, value) in line.iter().enumerate() {
                data[base + j * stride] = *value;
            }
        }
    }
}

fn multi_index(mut flat: usize, grid: usize, dimension: usize) -> Vec<usize> {
    let mut idx = vec![0; dimension];
    for slot in idx.iter_mut().rev() {
        *slot = flat % grid;
        flat /= grid;
    }
    idx
}

/// Samples `u(x) = U(n x)` on the grid `x_j = j / G`, `j ∈ {0..G-1}^D`, and
/// splits its normalised Fourier coefficients by alignment with `nZ^D`.
///
/// `sampler` receives `y = n x` unreduced and must be 1-periodic in `y`.
pub fn two_scale_fourier_check<F>(
    n: usize,
    sampler: F,
    dimension: usize,
    grid: usize,
) -> Result<TwoScaleReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if n == 0 || grid == 0 {
        return Err(Error::InvalidInput("n and grid size must be positive".into()));
    }
    if !grid.is_multiple_of(n) {
        return Err(Error::Aliasing { grid, scale: n });
    }
    if !(1..=4).contains(&dimension) {
        return Err(Error::InvalidInput(format!("unsupported dimension {dimension}")));
    }
    let total = grid.pow(dimension as u32);
    let mut data: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let y: Vec<f64> = multi_index(flat, grid, dimension)
                .into_iter()
                .map(|j| n as f64 * (j as f64 / grid as f64))
                .collect();
            Complex64::new(sampler(&y), 0.0)
        })
        .collect();
    fft_nd(&mut data, grid, dimension);
    let norm = total as f64;
    let half = grid as i64 / 2;
    let mut report = TwoScaleReport {
        n,
        grid,
        dimension,
        aligned_energy: 0.0,
        off_energy: 0.0,
        max_aligned_magnitude: 0.0,
        max_off_magnitude: 0.0,
        relative_off_mass: 0.0,
        significant_modes: Vec::new(),
    };
    for (flat, c) in data.iter().enumerate() {
        let mag = c.norm() / norm;
        let k: Vec<i64> = multi_index(flat, grid, dimension)
            .into_iter()
            .map(|j| {
                let j = j as i64;
                if j >= half {
                    j - grid as i64
                } else {
                    j
                }
            })
            .collect();
        let aligned = k.iter().all(|ki| ki.rem_euclid(n as i64) == 0);
        if aligned {
            report.aligned_energy += mag * mag;
            report.max_aligned_magnitude = report.max_aligned_magnitude.max(mag);
        } else {
            report.off_energy += mag * mag;
            report.max_off_magnitude = report.max_off_magnitude.max(mag);
        }
        if mag > 1e-12 {
            report.significant_modes.push((k, mag));
        }
    }
    let energy = report.aligned_energy + report.off_energy;
    if energy > 0.0 {
        report.relative_off_mass = report.off_energy / energy;
    }
    Ok(report)
}

/// Cell-scale profile `U(y) = 1{τ_r(y, -v) > t/ε}` of the survival indicator,
/// so that `U(x/ε) = Φ_ε(t, x, v)`. Points inside an obstacle map to 0.
pub fn phi_sampler(t: f64, v: &[f64], cfg: &LatticeConfig) -> impl Fn(&[f64]) -> f64 + Sync {
    let cfg = *cfg;
    let horizon = t * cfg.scale_inverse() as f64;
    let back: Vec<f64> = v.iter().map(|c| -c).collect();
    let r = cfg.radius();
    move |y: &[f64]| {
        let mut y = y.to_vec();
        reduce_to_cell(&mut y);
        if distance_to_lattice(&y) < r {
            return 0.0;
        }
        if horizon == 0.0 {
            return 1.0;
        }
        match first_hit(&y, &back, &cfg, horizon) {
            Ok(res) if res.censored() => 1.0,
            _ => 0.0,
        }
    }
}
