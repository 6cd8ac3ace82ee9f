//! Concentrated bump initial data `ρ(x) = b(m x)` on the unit torus.

use std::f64::consts::PI;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinetic::field::{mode_of, KineticField};
use crate::lattice::reduce_coordinate;

/// Base bump `b`, supported in `[-1/4, 1/4]^D` with values in `[0, 1]`.
#[derive(Clone, Default)]
pub enum BumpProfile {
    /// `b(x) = Π cos²(2π x_i)` on `[-1/4, 1/4]^D`.
    #[default]
    CosineSquared,
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl fmt::Debug for BumpProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BumpProfile::CosineSquared => f.write_str("CosineSquared"),
            BumpProfile::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl BumpProfile {
    pub fn name(&self) -> &'static str {
        match self {
            BumpProfile::CosineSquared => "cos2",
            BumpProfile::Custom(_) => "custom",
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        if y.iter().any(|c| c.abs() > 0.25) {
            return 0.0;
        }
        match self {
            BumpProfile::CosineSquared => y.iter().map(|c| (2.0 * PI * c).cos().powi(2)).product(),
            BumpProfile::Custom(b) => b(y),
        }
    }
}

/// Gauss-Legendre nodes per axis for custom-profile integrals.
const QUAD_NODES: usize = 48;
/// Sub-intervals per axis of `[-1/4, 1/4]`; each carries its own rule.
const QUAD_PANELS: usize = 4;
/// Grid points per axis of `[-1/2, 1/2]` for the profile checks.
const CHECK_GRID: usize = 200;

/// Tensor Gauss-Legendre rule on `[-1/4, 1/4]^D`, as (point, weight).
fn support_rule(dimension: usize) -> Vec<(Vec<f64>, f64)> {
    let gl = GaussLegendre::new(NonZeroUsize::new(QUAD_NODES).expect("nonzero"));
    let width = 0.5 / QUAD_PANELS as f64;
    let mut axis = Vec::with_capacity(QUAD_NODES * QUAD_PANELS);
    for p in 0..QUAD_PANELS {
        let lo = -0.25 + p as f64 * width;
        for &(node, weight) in gl.as_node_weight_pairs() {
            axis.push((lo + 0.5 * width * (node + 1.0), 0.5 * width * weight));
        }
    }
    let mut rule = vec![(Vec::new(), 1.0)];
    for _ in 0..dimension {
        rule = rule
            .into_iter()
            .flat_map(|(pt, w)| {
                axis.iter().map(move |&(x, wx)| {
                    let mut p = pt.clone();
                    p.push(x);
                    (p, w * wx)
                })
            })
            .collect();
    }
    rule
}

/// `ρ` with its profile, scale and norms.
#[derive(Debug, Clone)]
pub struct BumpInitialData {
    pub m: u32,
    pub dimension: usize,
    pub profile: BumpProfile,
    pub b_l1: f64,
    pub b_l2: f64,
    /// `‖ρ‖_{L¹} = m^{-D} ‖b‖_{L¹}`.
    pub rho_l1: f64,
    /// `‖ρ‖_{L²} = m^{-D/2} ‖b‖_{L²}`.
    pub rho_l2: f64,
}

pub fn make_bump_rho(m: u32, profile: BumpProfile, dimension: usize) -> Result<BumpInitialData> {
    if m == 0 {
        return Err(Error::InvalidInput("bump scale m must be at least 1".into()));
    }
    if !(1..=3).contains(&dimension) {
        return Err(Error::InvalidInput(format!("unsupported dimension {dimension}")));
    }
    let (b_l1, b_l2) = match &profile {
        BumpProfile::CosineSquared => (0.25f64.powi(dimension as i32), (3.0f64 / 16.0).powf(dimension as f64 / 2.0)),
        BumpProfile::Custom(_) => {
            check_profile(&profile, dimension)?;
            let rule = support_rule(dimension);
            let (mut l1, mut l2) = (0.0, 0.0);
            for (p, w) in &rule {
                let b = profile.eval(p);
                l1 += w * b;
                l2 += w * b * b;
            }
            (l1, l2.sqrt())
        }
    };
    let mf = m as f64;
    Ok(BumpInitialData {
        m,
        dimension,
        profile,
        b_l1,
        b_l2,
        rho_l1: b_l1 * mf.powi(-(dimension as i32)),
        rho_l2: b_l2 * mf.powf(-(dimension as f64) / 2.0),
    })
}

/// `0 ≤ b ≤ 1` everywhere and `b = 0` outside `[-1/4, 1/4]^D`, on a sample grid.
fn check_profile(profile: &BumpProfile, dimension: usize) -> Result<()> {
    let BumpProfile::Custom(b) = profile else {
        return Ok(());
    };
    let total = (CHECK_GRID + 1).pow(dimension as u32);
    for flat in 0..total {
        let mut rest = flat;
        let y: Vec<f64> = (0..dimension)
            .map(|_| {
                let j = rest % (CHECK_GRID + 1);
                rest /= CHECK_GRID + 1;
                -0.5 + j as f64 / CHECK_GRID as f64
            })
            .collect();
        let v = b(&y);
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidInput(format!("bump value {v} at {y:?} outside [0, 1]")));
        }
        if v != 0.0 && y.iter().any(|c| c.abs() > 0.25) {
            return Err(Error::InvalidInput(format!(
                "bump is nonzero at {y:?}, outside [-1/4, 1/4]^D"
            )));
        }
    }
    Ok(())
}

impl BumpInitialData {
    /// `ρ(x) = b(m x)` for `x` reduced to the fundamental cell.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x
            .iter()
            .map(|c| reduce_coordinate(*c).0 * self.m as f64)
            .collect();
        self.profile.eval(&y)
    }

    /// Fourier coefficient `ρ̂(ξ) = ∫ ρ(x) e^{-2πi ξ·x} dx`.
    pub fn fourier_coefficient(&self, xi: &[i64]) -> Complex64 {
        match &self.profile {
            BumpProfile::CosineSquared => {
                Complex64::new(xi.iter().map(|k| cos2_coefficient(*k, self.m)).product(), 0.0)
            }
            BumpProfile::Custom(_) => {
                let m = self.m as f64;
                let scale = m.powi(-(self.dimension as i32));
                support_rule(self.dimension)
                    .iter()
                    .map(|(y, w)| {
                        let phase: f64 = xi.iter().zip(y).map(|(k, c)| *k as f64 * c / m).sum();
                        Complex64::from_polar(w * self.profile.eval(y), -2.0 * PI * phase)
                    })
                    .sum::<Complex64>()
                    * scale
            }
        }
    }

    /// Velocity-independent field `f(x, v) = ρ(x)` truncated to `|ξ_i| ≤ M`.
    pub fn to_kinetic_field(&self, cutoff: usize, weights: &[f64]) -> KineticField {
        let mut field = KineticField::zeros(self.dimension, cutoff, weights);
        for (flat, mode) in field.modes.iter_mut().enumerate() {
            let c = self.fourier_coefficient(&mode_of(flat, self.dimension, cutoff));
            mode.iter_mut().for_each(|slot| *slot = c);
        }
        field
    }

    /// `‖ρ‖_{L¹} / ‖ρ‖_{L²}`.
    pub fn norm_ratio(&self) -> f64 {
        self.rho_l1 / self.rho_l2
    }
}

/// `∫_{-a}^{a} cos²(2π m x) e^{-2πikx} dx` with `a = 1/(4m)`.
fn cos2_coefficient(k: i64, m: u32) -> f64 {
    let a = 0.25 / m as f64;
    let s = |q: f64| {
        if q == 0.0 {
            2.0 * a
        } else {
            (2.0 * PI * q * a).sin() / (PI * q)
        }
    };
    let (k, two_m) = (k as f64, 2.0 * m as f64);
    0.5 * s(k) + 0.25 * (s(two_m + k) + s(two_m - k))
}
