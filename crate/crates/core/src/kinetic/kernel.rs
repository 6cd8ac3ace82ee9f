//! Discrete collision kernels `k(v, w)` on a velocity quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::quadrature::VelocityQuadrature;

/// Requested kernel shape.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// `k ≡ 1` against the normalised sphere measure.
    Uniform,
    /// Tabulated values `k[i][j] = k(v_i, v_j)` on the quadrature nodes.
    Custom(Vec<Vec<f64>>),
}

/// Collision frequency, kernel matrix and the quadrature it is normalised on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionKernelSpec {
    pub sigma: f64,
    pub k: Vec<Vec<f64>>,
    pub quadrature: VelocityQuadrature,
}

/// Largest asymmetry `|k_ij - k_ji|`.
fn asymmetry(k: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..k.len() {
        for j in 0..i {
            worst = worst.max((k[i][j] - k[j][i]).abs());
        }
    }
    worst
}

/// Column masses `s_j = Σ_i w_i k_ij`.
fn column_masses(k: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    (0..k.len())
        .map(|j| k.iter().zip(w).map(|(row, wi)| wi * row[j]).sum())
        .collect()
}

/// `max_j |Σ_i w_i k_ij − 1|`.
pub fn normalization_residual(k: &[Vec<f64>], w: &[f64]) -> f64 {
    column_masses(k, w)
        .into_iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `k_ij ← k_ij / √(s_i s_j)`; keeps the table exactly symmetric.
fn symmetric_rescale(k: &mut [Vec<f64>], w: &[f64]) {
    let roots: Vec<f64> = column_masses(k, w).into_iter().map(f64::sqrt).collect();
    let n = k.len();
    for i in 0..n {
        for j in 0..=i {
            let v = k[i][j] / (roots[i] * roots[j]);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
}

pub fn build_kernel(
    kind: KernelKind,
    sigma: f64,
    quadrature: &VelocityQuadrature,
) -> Result<CollisionKernelSpec> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")));
    }
    let n = quadrature.len();
    let w = &quadrature.weights;
    let k = match kind {
        KernelKind::Uniform => vec![vec![1.0; n]; n],
        KernelKind::Custom(table) => {
            if table.len() != n || table.iter().any(|row| row.len() != n) {
                return Err(Error::DimensionMismatch(format!(
                    "kernel table must be {n} x {n}"
                )));
            }
            if table.iter().flatten().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::KernelRejected("entries must be finite and positive".into()));
            }
            let mut k: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| 0.5 * (table[i][j] + table[j][i])).collect())
                .collect();
            if normalization_residual(&k, w) > 1e-14 {
                symmetric_rescale(&mut k, w);
                let residual = normalization_residual(&k, w);
                if residual > 1e-8 {
                    return Err(Error::KernelRejected(format!(
                        "normalization residual {residual:.3e} after symmetric rescaling"
                    )));
                }
                for _ in 0..50 {
                    if normalization_residual(&k, w) <= 1e-14 {
                        break;
                    }
                    symmetric_rescale(&mut k, w);
                }
            }
            k
        }
    };
    Ok(CollisionKernelSpec {
        sigma,
        k,
        quadrature: quadrature.clone(),
    })
}

impl CollisionKernelSpec {
    pub fn n_nodes(&self) -> usize {
        self.k.len()
    }

    pub fn normalization_residual(&self) -> f64 {
        normalization_residual(&self.k, &self.quadrature.weights)
    }

    pub fn asymmetry(&self) -> f64 {
        asymmetry(&self.k)
    }

    pub fn is_uniform(&self) -> bool {
        self.k.iter().flatten().all(|v| *v == 1.0)
    }
}
