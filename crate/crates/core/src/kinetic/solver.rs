//! Mode-by-mode exact solution of the discrete linear Boltzmann equation.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::field::{index_of, mode_cube, mode_of, KineticField};
use crate::kinetic::kernel::CollisionKernelSpec;

/// `A_ξ = −2πi diag(ξ·v_j) − σ I + σ K_w` with `(K_w)_ij = w_j k_ij`.
pub fn generator_matrix(xi: &[i64], kernel: &CollisionKernelSpec) -> DMatrix<Complex64> {
    let q = &kernel.quadrature;
    let n = q.len();
    let sigma = kernel.sigma;
    DMatrix::from_fn(n, n, |i, j| {
        let mut a = Complex64::new(sigma * q.weights[j] * kernel.k[i][j], 0.0);
        if i == j {
            let phase: f64 = xi.iter().zip(&q.nodes[i]).map(|(k, v)| *k as f64 * v).sum();
            a += Complex64::new(-sigma, -2.0 * PI * phase);
        }
        a
    })
}

/// Eigenvalues of `A_ξ`, sorted by decreasing real part.
pub fn generator_eigenvalues(xi: &[i64], kernel: &CollisionKernelSpec) -> Result<Vec<Complex64>> {
    let a = generator_matrix(xi, kernel);
    // Highly degenerate spectra (ξ = 0 at large N) can stall deflation at machine epsilon.
    let schur = [1.0, 8.0, 64.0]
        .into_iter()
        .find_map(|scale| Schur::try_new(a.clone(), scale * f64::EPSILON, 1_000_000))
        .ok_or_else(|| {
            Error::InvariantViolation(format!("Schur iteration did not converge for mode {xi:?}"))
        })?;
    let t = schur.unpack().1;
    let mut ev: Vec<Complex64> = t.diagonal().iter().copied().collect();
    ev.sort_by(|a, b| b.re.total_cmp(&a.re));
    Ok(ev)
}

fn check_times(t_points: &[f64]) -> Result<()> {
    if t_points.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidInput("times must be finite and nonnegative".into()));
    }
    if t_points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("times must be ascending".into()));
    }
    Ok(())
}

/// `f(t) = e^{tA} f_in` for every requested time.
///
/// Each mode is advanced by products of `exp(Δt A_ξ)` between consecutive
/// times; equal steps share one exponential. Modes `-ξ` are obtained by
/// conjugation, so real data stays exactly real.
pub fn solve_linear_boltzmann(
    f_in: &KineticField,
    kernel: &CollisionKernelSpec,
    t_points: &[f64],
) -> Result<Vec<KineticField>> {
    f_in.check_compatible(kernel.n_nodes())?;
    if f_in.dimension != kernel.quadrature.dimension {
        return Err(Error::DimensionMismatch(format!(
            "field dimension {} vs kernel dimension {}",
            f_in.dimension, kernel.quadrature.dimension
        )));
    }
    check_times(t_points)?;
    let total = f_in.n_modes();
    let zero = f_in.zero_index();
    let evolved: Vec<Vec<DVector<Complex64>>> = (0..=zero)
        .into_par_iter()
        .map(|flat| {
            let start = DVector::from_column_slice(&f_in.modes[flat]);
            if start.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
                return vec![start; t_points.len()];
            }
            let a = generator_matrix(&mode_of(flat, f_in.dimension, f_in.cutoff), kernel);
            let mut cache: HashMap<u64, DMatrix<Complex64>> = HashMap::new();
            let mut current = start;
            let mut prev = 0.0;
            let mut out = Vec::with_capacity(t_points.len());
            for &t in t_points {
                let dt = t - prev;
                if dt > 0.0 {
                    let step = cache
                        .entry(dt.to_bits())
                        .or_insert_with(|| (&a * Complex64::new(dt, 0.0)).exp());
                    current = &*step * &current;
                }
                prev = t;
                out.push(current.clone());
            }
            out
        })
        .collect();
    let mut fields = vec![f_in.clone(); t_points.len()];
    for (flat, series) in evolved.into_iter().enumerate() {
        let partner = total - 1 - flat;
        for (field, v) in fields.iter_mut().zip(series) {
            field.modes[flat] = v.iter().copied().collect();
            if partner != flat {
                field.modes[partner] = v.iter().map(|c| c.conj()).collect();
            }
        }
    }
    Ok(fields)
}

/// Spectral abscissa of one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeAbscissa {
    pub xi: Vec<i64>,
    /// Largest real part of the spectrum of `A_ξ` (the conserved zero
    /// eigenvalue excluded at `ξ = 0`).
    pub abscissa: f64,
}

/// Decay rate of the truncated system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub sigma: f64,
    #[serde(rename = "N")]
    pub n_nodes: usize,
    /// Largest `|ξ_i|` in the mode set.
    #[serde(rename = "M")]
    pub cutoff: usize,
    pub gap: f64,
    pub per_mode_abscissa: Vec<ModeAbscissa>,
}

/// `min_ξ (−abscissa(A_ξ))` over `mode_set`, which must contain `ξ = 0`.
pub fn spectral_gap(kernel: &CollisionKernelSpec, mode_set: &[Vec<i64>]) -> Result<SpectralReport> {
    if !mode_set.iter().any(|xi| xi.iter().all(|c| *c == 0)) {
        return Err(Error::InvalidInput("mode set must contain the zero mode".into()));
    }
    let dimension = kernel.quadrature.dimension;
    if mode_set.iter().any(|xi| xi.len() != dimension) {
        return Err(Error::DimensionMismatch(format!(
            "modes must have {dimension} components"
        )));
    }
    let per_mode: Vec<ModeAbscissa> = mode_set
        .par_iter()
        .map(|xi| {
            let ev = generator_eigenvalues(xi, kernel)?;
            let is_zero = xi.iter().all(|c| *c == 0);
            let abscissa = if is_zero {
                ev.get(1).map_or(f64::NEG_INFINITY, |e| e.re)
            } else {
                ev[0].re
            };
            Ok(ModeAbscissa {
                xi: xi.clone(),
                abscissa,
            })
        })
        .collect::<Result<_>>()?;
    let gap = per_mode
        .iter()
        .map(|m| -m.abscissa)
        .fold(f64::INFINITY, f64::min);
    let cutoff = mode_set
        .iter()
        .flatten()
        .map(|c| c.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    Ok(SpectralReport {
        sigma: kernel.sigma,
        n_nodes: kernel.n_nodes(),
        cutoff,
        gap,
        per_mode_abscissa: per_mode,
    })
}

/// [`spectral_gap`] over the full cube `{-M..M}^D`, using `A_{-ξ} = conj(A_ξ)`
/// to solve only half of it.
pub fn spectral_gap_cube(kernel: &CollisionKernelSpec, cutoff: usize) -> Result<SpectralReport> {
    let dimension = kernel.quadrature.dimension;
    let cube = mode_cube(dimension, cutoff);
    let half: Vec<Vec<i64>> = cube[..=(cube.len() - 1) / 2].to_vec();
    let mut report = spectral_gap(kernel, &half)?;
    let mut full = Vec::with_capacity(cube.len());
    for xi in &cube {
        let neg: Vec<i64> = xi.iter().map(|c| -c).collect();
        let key = if index_of(xi, cutoff) <= index_of(&neg, cutoff) { xi } else { &neg };
        let m = report
            .per_mode_abscissa
            .iter()
            .find(|m| &m.xi == key)
            .expect("half cube covers every mode up to sign");
        full.push(ModeAbscissa {
            xi: xi.clone(),
            abscissa: m.abscissa,
        });
    }
    report.per_mode_abscissa = full;
    report.cutoff = cutoff;
    Ok(report)
}
