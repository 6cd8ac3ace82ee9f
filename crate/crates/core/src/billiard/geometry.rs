//! Ray casting against the obstacle lattice.
//!
//! Since `r < 1/2`, the ball centred at a lattice point `c` lies strictly inside
//! the Voronoi cell `c + [-1/2, 1/2)^D`. A ray can therefore only meet that ball
//! while it is inside that cell, and walking the cells in the order the ray
//! visits them (axis stepping, as in voxel traversal) yields the first hit after
//! a single sphere test per cell.

use crate::error::Result;
use crate::lattice::{reduce_to_cell, validate_ray, LatticeConfig, MAX_DIM};
use crate::real::{dot, Real};

/// Hits with `|v·n|` below this are treated as tangential and skipped.
pub const GRAZING_TOL: f64 = 1e-9;

/// Minimal positive root accepted at the start of a flight, relative to `1 + elapsed`.
pub const RESTART_TOL: f64 = 1e-12;

/// One boundary interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionEvent<T = f64> {
    pub time: T,
    pub hit_point: Vec<T>,
    pub obstacle_center: Vec<i64>,
    /// Unit normal pointing out of the obstacle, into the billiard domain.
    pub inward_normal: Vec<T>,
    pub velocity_in: Vec<T>,
    pub velocity_out: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExitTimeResult<T = f64> {
    /// `None` when no obstacle is met within the horizon.
    pub tau: Option<T>,
    pub event: Option<CollisionEvent<T>>,
    pub grazing_rejections: usize,
}

impl<T: Real> ExitTimeResult<T> {
    pub fn censored(&self) -> bool {
        self.tau.is_none()
    }

    /// `tau` with censoring mapped to `+inf`.
    pub fn tau_or_inf(&self) -> f64 {
        self.tau.map_or(f64::INFINITY, |t| t.to_f64())
    }
}

/// Specular reflection across the hyperplane orthogonal to `n`.
pub fn reflect<T: Real>(xi: &[T], n: &[T]) -> Vec<T> {
    let two_dot = T::from_f64(2.0) * dot(xi, n);
    xi.iter().zip(n).map(|(&a, &b)| a - two_dot * b).collect()
}

/// First hit along the ray `x + t v`, `0 < t <= t_max`, on the unscaled table.
///
/// `x` need not be reduced; the returned event is expressed in the frame of
/// the input position. `velocity_out` is the specular reflection.
pub fn first_hit<T: Real>(
    x: &[T],
    v: &[T],
    cfg: &LatticeConfig,
    t_max: T,
) -> Result<ExitTimeResult<T>> {
    validate_ray(x, v, cfg)?;
    let mut local = x.to_vec();
    let shift = reduce_to_cell(&mut local);
    let radius = T::from_f64(cfg.radius());
    let trace = trace_ray(&local, v, radius, t_max, T::from_f64(RESTART_TOL));
    let Some(hit) = trace.hit else {
        return Ok(ExitTimeResult {
            tau: None,
            event: None,
            grazing_rejections: trace.grazing,
        });
    };
    let mut event = collision_at(&local, v, &hit, &reflect);
    for i in 0..x.len() {
        event.hit_point[i] += T::from_f64(shift[i] as f64);
        event.obstacle_center[i] += shift[i];
    }
    Ok(ExitTimeResult {
        tau: Some(hit.tau),
        event: Some(event),
        grazing_rejections: trace.grazing,
    })
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct RayHit<T> {
    pub tau: T,
    pub cell: [i64; MAX_DIM],
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct RayTrace<T> {
    pub hit: Option<RayHit<T>>,
    pub grazing: usize,
}

/// Builds the event for a hit found by [`trace_ray`] from the reduced position `x`.
/// Hit point and centre are in the frame of `x`.
pub(crate) fn collision_at<T: Real>(
    x: &[T],
    v: &[T],
    hit: &RayHit<T>,
    bounce: &dyn Fn(&[T], &[T]) -> Vec<T>,
) -> CollisionEvent<T> {
    let d = x.len();
    let hit_point: Vec<T> = (0..d).map(|i| x[i] + hit.tau * v[i]).collect();
    let offset: Vec<T> = (0..d)
        .map(|i| hit_point[i] - T::from_f64(hit.cell[i] as f64))
        .collect();
    let len = dot(&offset, &offset).sqrt();
    let normal: Vec<T> = offset.iter().map(|&c| c.quot(len)).collect();
    let velocity_out = bounce(v, &normal);
    CollisionEvent {
        time: hit.tau,
        hit_point,
        obstacle_center: hit.cell[..d].to_vec(),
        inward_normal: normal,
        velocity_in: v.to_vec(),
        velocity_out,
    }
}

/// Walks the lattice cells along `x + t v` (with `x` in the fundamental cell)
/// and returns the first sphere entry with `min_t < t <= t_max`.
///
/// A start on or inside a ball while heading into it is reported as a hit at
/// `t = 0`.
pub(crate) fn trace_ray<T: Real>(x: &[T], v: &[T], radius: T, t_max: T, min_t: T) -> RayTrace<T> {
    let d = x.len();
    let zero = T::zero();
    let half = T::from_f64(0.5);
    let r2 = radius * radius;
    let a = dot(v, v);
    let grazing_tol = T::from_f64(GRAZING_TOL);

    let mut cell = [0i64; MAX_DIM];
    let mut next = [zero; MAX_DIM];
    let mut delta = [zero; MAX_DIM];
    let mut step = [0i64; MAX_DIM];
    for i in 0..d {
        if v[i] > zero {
            step[i] = 1;
            next[i] = (half - x[i]).quot(v[i]);
            delta[i] = T::one().quot(v[i]);
        } else if v[i] < zero {
            step[i] = -1;
            next[i] = (-half - x[i]).quot(v[i]);
            delta[i] = -T::one().quot(v[i]);
        }
    }

    let mut grazing = 0usize;
    let mut w = [zero; MAX_DIM];
    loop {
        // Sphere at the current cell centre.
        let mut p = zero;
        let mut ww = zero;
        for i in 0..d {
            w[i] = T::from_f64(cell[i] as f64) - x[i];
            p += w[i] * v[i];
            ww += w[i] * w[i];
        }
        let s = p.quot(a);
        let mut perp2 = zero;
        for i in 0..d {
            let c = w[i] - s * v[i];
            perp2 += c * c;
        }
        let h = r2 - perp2;
        if h >= zero {
            let sq = (a * h).sqrt();
            let q = if p >= zero { p + sq } else { p - sq };
            if q != zero {
                let cc = ww - r2;
                let r1 = q.quot(a);
                let r2root = cc.quot(q);
                let (entry, exit) = if r1 <= r2root { (r1, r2root) } else { (r2root, r1) };
                if exit > min_t {
                    if entry <= min_t {
                        return RayTrace {
                            hit: Some(RayHit { tau: zero, cell }),
                            grazing,
                        };
                    }
                    if entry > t_max {
                        return RayTrace { hit: None, grazing };
                    }
                    // |v·n| at entry equals sqrt(h)/r for unit v.
                    if h.sqrt() < grazing_tol * radius {
                        grazing += 1;
                    } else {
                        return RayTrace {
                            hit: Some(RayHit { tau: entry, cell }),
                            grazing,
                        };
                    }
                }
            }
        }

        // Advance to the next cell.
        let mut axis = usize::MAX;
        let mut t_next = zero;
        for i in 0..d {
            if step[i] != 0 && (axis == usize::MAX || next[i] < t_next) {
                axis = i;
                t_next = next[i];
            }
        }
        if axis == usize::MAX || t_next > t_max {
            return RayTrace { hit: None, grazing };
        }
        cell[axis] += step[axis];
        next[axis] += delta[axis];
    }
}
