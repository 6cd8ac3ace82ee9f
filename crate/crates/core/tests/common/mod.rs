//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// First entry time of `x + t v` into any ball `B_r(k)`, `k ∈ Z^D`, for
/// `0 < t <= t_max`, by testing every lattice point within `r` of each unit
/// piece of the segment. No cell walk, no reduction of `x`.
pub fn brute_force_first_hit(x: &[f64], v: &[f64], r: f64, t_max: f64) -> Option<f64> {
    let d = x.len();
    let pieces = t_max.ceil() as usize;
    let mut best: Option<f64> = None;
    for s in 0..pieces {
        let t0 = s as f64;
        if best.is_some_and(|b| b < t0) {
            break;
        }
        let t1 = (t0 + 1.0).min(t_max);
        let lo: Vec<i64> = (0..d)
            .map(|i| ((x[i] + t0 * v[i]).min(x[i] + t1 * v[i]) - r).floor() as i64)
            .collect();
        let hi: Vec<i64> = (0..d)
            .map(|i| ((x[i] + t0 * v[i]).max(x[i] + t1 * v[i]) + r).ceil() as i64)
            .collect();
        let mut k = lo.clone();
        loop {
            if let Some(t) = sphere_entry(x, v, &k, r) {
                if t > 0.0 && t <= t_max && best.is_none_or(|b| t < b) {
                    best = Some(t);
                }
            }
            let mut axis = 0;
            while axis < d {
                k[axis] += 1;
                if k[axis] <= hi[axis] {
                    break;
                }
                k[axis] = lo[axis];
                axis += 1;
            }
            if axis == d {
                break;
            }
        }
    }
    best
}

/// Entry time into `B_r(k)` from the closest-approach decomposition.
fn sphere_entry(x: &[f64], v: &[f64], k: &[i64], r: f64) -> Option<f64> {
    let w: Vec<f64> = k.iter().zip(x).map(|(&k, &x)| k as f64 - x).collect();
    let along: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
    let miss2: f64 = w.iter().zip(v).map(|(a, b)| (a - along * b).powi(2)).sum();
    let h2 = r * r - miss2;
    if h2 < 0.0 {
        return None;
    }
    Some(along - h2.sqrt())
}

/// Sampler independent of the library's streams: `StdRng`, rejection of the
/// central ball, Box-Muller directions.
pub struct OracleSampler {
    rng: StdRng,
}

impl OracleSampler {
    pub fn new(seed: u64) -> Self {
        OracleSampler {
            rng: StdRng::seed_from_u64(seed),
        }
    }

    pub fn free_point(&mut self, d: usize, r: f64) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..d).map(|_| self.rng.random::<f64>() - 0.5).collect();
            if x.iter().map(|c| c * c).sum::<f64>() >= r * r {
                return x;
            }
        }
    }

    pub fn direction(&mut self, d: usize) -> Vec<f64> {
        loop {
            let g: Vec<f64> = (0..d)
                .map(|_| {
                    let u1: f64 = 1.0 - self.rng.random::<f64>();
                    let u2: f64 = self.rng.random();
                    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                })
                .collect();
            let n = g.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n > 1e-8 {
                return g.into_iter().map(|c| c / n).collect();
            }
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }
}
