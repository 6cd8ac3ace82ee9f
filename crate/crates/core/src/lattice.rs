//! Lattice configuration and phase-space points.
//!
//! Obstacles are balls of radius `r` centred on the integer lattice. Positions
//! are always reduced to the fundamental cell `[-1/2, 1/2)^D`, whose only
//! obstacle is the ball at the origin. The scaled table of mesh `ε = 1/n` is
//! never simulated directly; it is reached by conjugating the unscaled flow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{norm, Real};

/// Upper bound on the supported dimension; kernel scratch arrays live on the stack.
pub const MAX_DIM: usize = 8;

const UNIT_SPEED_TOL: f64 = 1e-9;
const INSIDE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    dimension: usize,
    radius: f64,
    /// `n` with `ε = 1/n`.
    scale_inverse: u64,
    r_star: Option<f64>,
}

impl LatticeConfig {
    /// Unscaled table (`ε = 1`) without Boltzmann-Grad coupling.
    pub fn new(dimension: usize, radius: f64) -> Result<Self> {
        check_dimension(dimension)?;
        check_radius(radius)?;
        Ok(LatticeConfig {
            dimension,
            radius,
            scale_inverse: 1,
            r_star: None,
        })
    }

    /// Boltzmann-Grad coupled table: `ε = 1/n`, `r = r_* ε^{1/(D-1)}`.
    pub fn boltzmann_grad(dimension: usize, r_star: f64, n: u64) -> Result<Self> {
        check_dimension(dimension)?;
        if !(r_star > 0.0 && r_star.is_finite()) {
            return Err(Error::InvalidConfig(format!("r_star must be positive, got {r_star}")));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("scale inverse n must be >= 1".into()));
        }
        let eps = 1.0 / n as f64;
        let radius = r_star * eps.powf(1.0 / (dimension as f64 - 1.0));
        check_radius(radius)?;
        Ok(LatticeConfig {
            dimension,
            radius,
            scale_inverse: n,
            r_star: Some(r_star),
        })
    }

    /// Coupled table recovered from a radius: picks `r_* = r / ε^{1/(D-1)}`.
    pub fn from_radius_and_scale(dimension: usize, radius: f64, n: u64) -> Result<Self> {
        check_dimension(dimension)?;
        if n == 0 {
            return Err(Error::InvalidConfig("scale inverse n must be >= 1".into()));
        }
        let eps = 1.0 / n as f64;
        let r_star = radius / eps.powf(1.0 / (dimension as f64 - 1.0));
        let cfg = Self::boltzmann_grad(dimension, r_star, n)?;
        Ok(LatticeConfig { radius, ..cfg })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn scale_inverse(&self) -> u64 {
        self.scale_inverse
    }

    pub fn epsilon(&self) -> f64 {
        1.0 / self.scale_inverse as f64
    }

    pub fn r_star(&self) -> Option<f64> {
        self.r_star
    }

    pub fn is_coupled(&self) -> bool {
        self.r_star.is_some()
    }

    /// `1 / r^{D-1}`, the threshold beyond which the free-path tail bounds apply.
    pub fn tail_threshold(&self) -> f64 {
        self.radius.powi(self.dimension as i32 - 1).recip()
    }

    /// Lebesgue measure of the punctured cell `[-1/2,1/2)^D \ B_r`.
    pub fn free_volume(&self) -> f64 {
        1.0 - unit_ball_volume(self.dimension) * self.radius.powi(self.dimension as i32)
    }

    /// Checks the coupling `r = r_* ε^{1/(D-1)}` to relative precision `1e-12`.
    pub fn check_coupling(&self) -> Result<()> {
        let Some(r_star) = self.r_star else {
            return Err(Error::InvalidConfig("Boltzmann-Grad coupling is not active".into()));
        };
        let expected = r_star * self.epsilon().powf(1.0 / (self.dimension as f64 - 1.0));
        if ((self.radius - expected) / expected).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "radius {} inconsistent with r_star {} at eps {}",
                self.radius,
                r_star,
                self.epsilon()
            )));
        }
        Ok(())
    }
}

fn check_dimension(dimension: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&dimension) {
        return Err(Error::InvalidConfig(format!(
            "dimension must be in 2..={MAX_DIM}, got {dimension}"
        )));
    }
    Ok(())
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius < 0.5) {
        return Err(Error::InvalidConfig(format!("radius must lie in (0, 1/2), got {radius}")));
    }
    Ok(())
}

/// Volume of the unit ball in `R^D`.
pub fn unit_ball_volume(dimension: usize) -> f64 {
    match dimension {
        0 => 1.0,
        1 => 2.0,
        d => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

/// Position and unit velocity of a particle, position in the fundamental cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<T = f64> {
    pub position: Vec<T>,
    pub velocity: Vec<T>,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(position: Vec<T>, velocity: Vec<T>) -> Self {
        PhasePoint { position, velocity }
    }

    pub fn dimension(&self) -> usize {
        self.position.len()
    }

    /// Velocity flipped, position unchanged.
    pub fn reversed(&self) -> Self {
        PhasePoint {
            position: self.position.clone(),
            velocity: self.velocity.iter().map(|&c| -c).collect(),
        }
    }

    pub fn to_f64(&self) -> PhasePoint<f64> {
        PhasePoint {
            position: self.position.iter().map(|c| c.to_f64()).collect(),
            velocity: self.velocity.iter().map(|c| c.to_f64()).collect(),
        }
    }

    pub fn from_f64(p: &PhasePoint<f64>) -> Self {
        PhasePoint {
            position: p.position.iter().map(|&c| T::from_f64(c)).collect(),
            velocity: p.velocity.iter().map(|&c| T::from_f64(c)).collect(),
        }
    }

    /// Checks unit speed and that the point is not inside an obstacle.
    pub fn validate(&self, cfg: &LatticeConfig) -> Result<()> {
        validate_ray(&self.position, &self.velocity, cfg)
    }
}

pub(crate) fn validate_ray<T: Real>(x: &[T], v: &[T], cfg: &LatticeConfig) -> Result<()> {
    let d = cfg.dimension();
    if x.len() != d || v.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "expected {d}-vectors, got position {} and velocity {}",
            x.len(),
            v.len()
        )));
    }
    if x.iter().chain(v).any(|c| !c.to_f64().is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    let speed = norm(v).to_f64();
    if (speed - 1.0).abs() > UNIT_SPEED_TOL {
        return Err(Error::InvalidInput(format!("velocity norm {speed} is not 1")));
    }
    let dist = distance_to_lattice(x).to_f64();
    if dist < cfg.radius() - INSIDE_TOL {
        return Err(Error::InsideObstacle {
            distance: dist,
            radius: cfg.radius(),
        });
    }
    Ok(())
}

/// Index of the lattice point whose Voronoi cell `[k-1/2, k+1/2)` contains `x`.
#[inline]
pub fn nearest_cell<T: Real>(x: T) -> T {
    let half = T::from_f64(0.5);
    let k = x.round();
    let frac = x - k;
    if frac >= half {
        k + T::one()
    } else if frac < -half {
        k - T::one()
    } else {
        k
    }
}

/// Reduces a coordinate to `[-1/2, 1/2)`, returning `(reduced, cell index)`.
#[inline]
pub fn reduce_coordinate<T: Real>(x: T) -> (T, i64) {
    let k = nearest_cell(x);
    (x - k, k.to_f64() as i64)
}

/// Reduces a position to the fundamental cell in place, returning the lattice shift.
pub fn reduce_to_cell<T: Real>(x: &mut [T]) -> Vec<i64> {
    x.iter_mut()
        .map(|c| {
            let (r, k) = reduce_coordinate(*c);
            *c = r;
            k
        })
        .collect()
}

/// Distance from `x` to the nearest lattice point.
pub fn distance_to_lattice<T: Real>(x: &[T]) -> T {
    let mut acc = T::zero();
    for &c in x {
        let off = c - nearest_cell(c);
        acc += off * off;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_sets_radius() {
        let cfg = LatticeConfig::boltzmann_grad(2, 1.0, 10).unwrap();
        assert!((cfg.radius() - 0.1).abs() < 1e-15);
        assert!((cfg.epsilon() - 0.1).abs() < 1e-16);
        cfg.check_coupling().unwrap();

        let cfg3 = LatticeConfig::boltzmann_grad(3, 0.4, 4).unwrap();
        assert!((cfg3.radius() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_touching_obstacles() {
        assert!(LatticeConfig::new(2, 0.5).is_err());
        assert!(LatticeConfig::new(2, 0.0).is_err());
        assert!(LatticeConfig::new(1, 0.1).is_err());
        assert!(LatticeConfig::boltzmann_grad(2, 6.0, 10).is_err());
        assert!(LatticeConfig::boltzmann_grad(2, 0.1, 0).is_err());
    }

    #[test]
    fn uncoupled_config_fails_coupling_check() {
        assert!(LatticeConfig::new(2, 0.1).unwrap().check_coupling().is_err());
    }

    #[test]
    fn reduction_lands_in_half_open_cell() {
        for &x in &[-0.5, 0.5, 1.5, -1.5, 0.49999999999999994, -2.25, 7.75, 0.0] {
            let (r, k) = reduce_coordinate(x);
            assert!((-0.5..0.5).contains(&r), "{x} -> {r}");
            assert_eq!(r + k as f64, x);
        }
    }

    #[test]
    fn ball_volumes() {
        use std::f64::consts::PI;
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        let cfg = LatticeConfig::new(2, 0.1).unwrap();
        let inside = PhasePoint::new(vec![0.05, 0.0], vec![1.0, 0.0]);
        assert!(matches!(inside.validate(&cfg), Err(Error::InsideObstacle { .. })));
        let slow = PhasePoint::new(vec![0.3, 0.3], vec![0.5, 0.0]);
        assert!(matches!(slow.validate(&cfg), Err(Error::InvalidInput(_))));
        let ok = PhasePoint::new(vec![0.1, 0.0], vec![0.0, 1.0]);
        ok.validate(&cfg).unwrap();
    }
}
