//! Event-driven billiard flow, absorbing transport and the survival indicator.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::billiard::geometry::{
    collision_at, first_hit, reflect, trace_ray, CollisionEvent, RESTART_TOL,
};
use crate::error::{Error, Result};
use crate::lattice::{reduce_coordinate, reduce_to_cell, LatticeConfig, PhasePoint};
use crate::real::{dot, Real};

/// Outgoing distribution for the diffuse law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffuseSampling {
    /// Uniform on the outgoing half-sphere.
    #[default]
    Uniform,
    /// Density proportional to `v·n` on the outgoing half-sphere.
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryLaw {
    #[default]
    Specular,
    Absorbing,
    Diffuse(DiffuseSampling),
}

/// Result of [`evolve_billiard`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T = f64> {
    /// Final state, position reduced to the fundamental cell.
    pub state: PhasePoint<T>,
    /// Collisions in time order; positions and centres in the unfolded frame of
    /// the initial position.
    pub events: Vec<CollisionEvent<T>>,
    /// Integer translation from the initial cell to the final one.
    pub lattice_shift: Vec<i64>,
    pub grazing_rejections: usize,
}

impl<T: Real> Trajectory<T> {
    /// Final position in the unfolded frame.
    pub fn unfolded_position(&self) -> Vec<T> {
        self.state
            .position
            .iter()
            .zip(&self.lattice_shift)
            .map(|(&x, &k)| x + T::from_f64(k as f64))
            .collect()
    }
}

/// Evolves `p` for time `t` on the unscaled table.
///
/// `Absorbing` is rejected here; see [`absorbing_transport`].
pub fn evolve_billiard<T: Real, R: Rng + ?Sized>(
    p: &PhasePoint<T>,
    t: T,
    cfg: &LatticeConfig,
    law: BoundaryLaw,
    rng: &mut R,
    max_events: usize,
) -> Result<Trajectory<T>> {
    match law {
        BoundaryLaw::Specular => evolve_core(p, t, cfg, max_events, &mut |v, n| reflect(v, n)),
        BoundaryLaw::Diffuse(mode) => evolve_core(p, t, cfg, max_events, &mut |_, n| {
            let n64: Vec<f64> = n.iter().map(|c| c.to_f64()).collect();
            sample_outgoing(&n64, mode, rng)
                .into_iter()
                .map(T::from_f64)
                .collect()
        }),
        BoundaryLaw::Absorbing => Err(Error::InvalidInput(
            "absorbing law has no flow; use absorbing_transport".into(),
        )),
    }
}

/// Specular flow; needs no random stream.
pub fn evolve_specular<T: Real>(
    p: &PhasePoint<T>,
    t: T,
    cfg: &LatticeConfig,
    max_events: usize,
) -> Result<Trajectory<T>> {
    evolve_core(p, t, cfg, max_events, &mut |v, n| reflect(v, n))
}

fn evolve_core<T: Real>(
    p: &PhasePoint<T>,
    t: T,
    cfg: &LatticeConfig,
    max_events: usize,
    bounce: &mut dyn FnMut(&[T], &[T]) -> Vec<T>,
) -> Result<Trajectory<T>> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidInput(format!("negative time {:?}", t)));
    }
    p.validate(cfg)?;
    let d = p.dimension();
    let radius = T::from_f64(cfg.radius());
    let mut x = p.position.clone();
    let mut shift = reduce_to_cell(&mut x);
    let mut v = p.velocity.clone();
    let mut elapsed = T::zero();
    let mut events = Vec::new();
    let mut grazing = 0;

    loop {
        let remaining = t - elapsed;
        if remaining <= T::zero() {
            break;
        }
        let min_t = T::from_f64(RESTART_TOL) * (T::one() + elapsed);
        let trace = trace_ray(&x, &v, radius, remaining, min_t);
        grazing += trace.grazing;
        let Some(hit) = trace.hit else {
            for i in 0..d {
                x[i] += remaining * v[i];
            }
            for (k, s) in reduce_to_cell(&mut x).into_iter().zip(shift.iter_mut()) {
                *s += k;
            }
            break;
        };
        if events.len() >= max_events {
            return Err(Error::EventBudgetExceeded {
                max_events,
                time: (elapsed + hit.tau).to_f64(),
            });
        }
        let mut event = collision_at_mut(&x, &v, &hit, bounce);
        // Restart from the contact point, expressed relative to the hit obstacle.
        for i in 0..d {
            x[i] = event.hit_point[i] - T::from_f64(hit.cell[i] as f64);
        }
        elapsed += hit.tau;
        v = event.velocity_out.clone();
        event.time = elapsed;
        for i in 0..d {
            event.hit_point[i] += T::from_f64(shift[i] as f64);
            event.obstacle_center[i] += shift[i];
            shift[i] += hit.cell[i];
        }
        events.push(event);
    }

    Ok(Trajectory {
        state: PhasePoint::new(x, v),
        events,
        lattice_shift: shift,
        grazing_rejections: grazing,
    })
}

fn collision_at_mut<T: Real>(
    x: &[T],
    v: &[T],
    hit: &crate::billiard::geometry::RayHit<T>,
    bounce: &mut dyn FnMut(&[T], &[T]) -> Vec<T>,
) -> CollisionEvent<T> {
    let mut ev = collision_at(x, v, hit, &|a, _| a.to_vec());
    ev.velocity_out = bounce(v, &ev.inward_normal);
    ev
}

/// Draws an outgoing unit direction on the half-sphere `{u : u·n > 0}`.
pub fn sample_outgoing<R: Rng + ?Sized>(n: &[f64], mode: DiffuseSampling, rng: &mut R) -> Vec<f64> {
    let d = n.len();
    loop {
        let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let out = match mode {
            DiffuseSampling::Uniform => {
                let len = dot(&g, &g).sqrt();
                let s = if dot(&g, n) < 0.0 { -1.0 } else { 1.0 };
                g.iter().map(|c| s * c / len).collect::<Vec<_>>()
            }
            DiffuseSampling::Cosine => {
                // Uniform point of the tangent (D-1)-ball lifted to the sphere.
                let gn = dot(&g, n);
                let tangent: Vec<f64> = g.iter().zip(n).map(|(a, b)| a - gn * b).collect();
                let tlen = dot(&tangent, &tangent).sqrt();
                if tlen == 0.0 {
                    continue;
                }
                let u: f64 = rng.random();
                let rho = u.powf(1.0 / (d as f64 - 1.0));
                let lift = (1.0 - rho * rho).max(0.0).sqrt();
                tangent
                    .iter()
                    .zip(n)
                    .map(|(t, nn)| rho * t / tlen + lift * nn)
                    .collect()
            }
        };
        if dot(&out, n) > 0.0 {
            return out;
        }
    }
}

/// Free transport with absorption at the first obstacle contact.
///
/// Returns whether the particle survives up to `t` and its free-flight image.
pub fn absorbing_transport(
    p: &PhasePoint,
    t: f64,
    cfg: &LatticeConfig,
) -> Result<(bool, PhasePoint)> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("negative time {t}")));
    }
    let res = first_hit(&p.position, &p.velocity, cfg, t)?;
    let mut x: Vec<f64> = p
        .position
        .iter()
        .zip(&p.velocity)
        .map(|(x, v)| x + t * v)
        .collect();
    reduce_to_cell(&mut x);
    Ok((res.censored(), PhasePoint::new(x, p.velocity.clone())))
}

/// `1` iff `ε τ_r(x/ε, -v) > t` on the Boltzmann-Grad scaled table.
pub fn survival_indicator(t: f64, x: &[f64], v: &[f64], cfg: &LatticeConfig) -> Result<u8> {
    cfg.check_coupling()?;
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("negative time {t}")));
    }
    let n = cfg.scale_inverse() as f64;
    let y: Vec<f64> = x.iter().map(|c| c * n).collect();
    let back: Vec<f64> = v.iter().map(|c| -c).collect();
    if t == 0.0 {
        crate::lattice::validate_ray(&y, &back, cfg)?;
        return Ok(1);
    }
    let res = first_hit(&y, &back, cfg, t * n)?;
    Ok(u8::from(res.censored()))
}

/// Position on the unit torus `[-1/2,1/2)^D` of the scaled table, given the
/// unscaled cell-reduced position and the accumulated lattice shift.
pub fn torus_position(local: &[f64], shift: &[i64], n: u64) -> Vec<f64> {
    let n_i = n as i64;
    local
        .iter()
        .zip(shift)
        .map(|(&x, &k)| reduce_coordinate((k.rem_euclid(n_i) as f64 + x) / n as f64).0)
        .collect()
}

/// State on the scaled table, tracked through its unscaled representative.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledState {
    /// Position inside the unscaled fundamental cell.
    pub local: PhasePoint,
    /// Unscaled cell index, modulo `n` in each coordinate.
    pub cell: Vec<i64>,
}

impl ScaledState {
    /// Lifts a torus position `x` to its unscaled representative `x/ε`.
    pub fn from_torus(x: &[f64], v: &[f64], cfg: &LatticeConfig) -> Self {
        let n = cfg.scale_inverse();
        let mut y: Vec<f64> = x.iter().map(|c| c * n as f64).collect();
        let cell = reduce_to_cell(&mut y)
            .into_iter()
            .map(|k| k.rem_euclid(n as i64))
            .collect();
        ScaledState {
            local: PhasePoint::new(y, v.to_vec()),
            cell,
        }
    }

    pub fn torus_position(&self, n: u64) -> Vec<f64> {
        torus_position(&self.local.position, &self.cell, n)
    }
}

/// Scaled flow `X_ε(t; x, v) = ε X(t/ε; x/ε, v)`, by conjugation of the unscaled flow.
///
/// Event times in the returned trajectory are unscaled (multiply by `ε`).
pub fn evolve_scaled<R: Rng + ?Sized>(
    state: &ScaledState,
    t: f64,
    cfg: &LatticeConfig,
    law: BoundaryLaw,
    rng: &mut R,
    max_events: usize,
) -> Result<(ScaledState, Trajectory)> {
    let n = cfg.scale_inverse();
    let traj = evolve_billiard(&state.local, t * n as f64, cfg, law, rng, max_events)?;
    let cell = state
        .cell
        .iter()
        .zip(&traj.lattice_shift)
        .map(|(c, s)| (c + s).rem_euclid(n as i64))
        .collect();
    Ok((
        ScaledState {
            local: traj.state.clone(),
            cell,
        },
        traj,
    ))
}
