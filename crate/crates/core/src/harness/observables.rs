//! Weighted-particle estimates of `∬ f_ε φ` (specular) and `∬ g_ε φ` (absorbing).
//!
//! Particles start uniformly on the scaled free domain and carry the weight
//! `ρ(x₀, v₀)`; since both flows preserve the phase measure, pushing weights
//! forward is exact and involves no grid.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::billiard::{evolve_scaled, first_hit, BoundaryLaw};
use crate::ensemble::sample_scaled_phase;
use crate::error::{Error, Result};
use crate::lattice::{reduce_coordinate, LatticeConfig};
use crate::rng::{derive_seed, substream};
use crate::stats::mean_and_std_err;

const MAX_EVENTS: usize = 10_000_000;

/// Bounded test function `φ(x, v)` on torus × sphere.
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    pub phi: Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>,
}

impl TestFunction {
    pub fn new<F>(name: &str, phi: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        TestFunction {
            name: name.to_string(),
            phi: Arc::new(phi),
        }
    }

    pub fn one() -> Self {
        Self::new("one", |_, _| 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRow {
    pub epsilon: f64,
    pub t: f64,
    pub test: String,
    /// `∬ f_ε(t) φ`, relative to the normalised phase measure.
    pub specular: f64,
    pub specular_se: f64,
    /// `∬ g_ε(t) φ`.
    pub absorbing: f64,
    pub absorbing_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub epsilon: f64,
    pub t: f64,
    /// `Σ w·1{alive} / Σ w`.
    pub survival: f64,
    pub std_err: f64,
    /// `Σ_k q_k Φ_k²` over direction bins with equal weights `q_k`.
    pub jensen_square_mean: f64,
    /// `(Σ_k q_k Φ_k)²`.
    pub jensen_mean_square: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableTable {
    pub n_particles: usize,
    pub seed: u64,
    pub rows: Vec<ObservableRow>,
    pub survival: Vec<SurvivalRow>,
}

/// Equal-measure direction bins: angular sectors in 2D, sign orthants otherwise.
fn direction_bin(v: &[f64], bins: usize) -> usize {
    if v.len() == 2 {
        let a = v[1].atan2(v[0]).rem_euclid(2.0 * PI);
        ((a / (2.0 * PI) * bins as f64) as usize).min(bins - 1)
    } else {
        v.iter()
            .enumerate()
            .fold(0, |acc, (i, c)| acc | (usize::from(*c < 0.0) << i))
    }
}

fn bin_count(dimension: usize, requested: usize) -> usize {
    if dimension == 2 {
        requested.max(1)
    } else {
        1 << dimension
    }
}

/// Per-particle values at every requested time.
struct ParticleTrace {
    weight: f64,
    bin: usize,
    /// `[t][test]` values of `w φ` along the specular flow.
    specular: Vec<Vec<f64>>,
    /// `[t][test]` values of `w φ(x₀ + t v₀, v₀) 1{alive}`.
    absorbing: Vec<Vec<f64>>,
    alive: Vec<bool>,
}

fn trace_particle<R>(
    rho: &R,
    t_list: &[f64],
    cfg: &LatticeConfig,
    tests: &[TestFunction],
    rng: &mut crate::rng::SampleRng,
    bins: usize,
) -> Result<ParticleTrace>
where
    R: Fn(&[f64], &[f64]) -> f64,
{
    let n = cfg.scale_inverse();
    let eps = cfg.epsilon();
    let start = sample_scaled_phase(rng, cfg);
    let x0 = start.torus_position(n);
    let v0 = start.local.velocity.clone();
    let weight = rho(&x0, &v0);
    if !(weight >= 0.0 && weight.is_finite()) {
        return Err(Error::InvalidInput(format!("initial density {weight} at {x0:?}")));
    }
    let horizon = t_list.last().copied().unwrap_or(0.0) / eps;
    let tau = first_hit(&start.local.position, &v0, cfg, horizon)?.tau_or_inf();

    let mut state = start;
    let mut now = 0.0;
    let mut out = ParticleTrace {
        weight,
        bin: direction_bin(&v0, bins),
        specular: Vec::with_capacity(t_list.len()),
        absorbing: Vec::with_capacity(t_list.len()),
        alive: Vec::with_capacity(t_list.len()),
    };
    for &t in t_list {
        if t > now {
            state = evolve_scaled(&state, t - now, cfg, BoundaryLaw::Specular, rng, MAX_EVENTS)?.0;
            now = t;
        }
        let x = state.torus_position(n);
        let alive = tau * eps > t;
        let free: Vec<f64> = x0
            .iter()
            .zip(&v0)
            .map(|(a, b)| reduce_coordinate(a + t * b).0)
            .collect();
        out.specular
            .push(tests.iter().map(|p| weight * (p.phi)(&x, &state.local.velocity)).collect());
        out.absorbing.push(
            tests
                .iter()
                .map(|p| if alive { weight * (p.phi)(&free, &v0) } else { 0.0 })
                .collect(),
        );
        out.alive.push(alive);
    }
    Ok(out)
}

/// Estimates of the specular and absorbing observables for each scaled table.
///
/// `configs` must carry the Boltzmann-Grad coupling; `t_list` is ascending.
/// The survival observable is checked against Jensen's inequality over
/// `direction_bins` equal-measure direction sectors (orthants for `D ≥ 3`).
pub fn empirical_fe_observables<R>(
    rho: &R,
    t_list: &[f64],
    configs: &[LatticeConfig],
    tests: &[TestFunction],
    n_particles: usize,
    seed: u64,
    direction_bins: usize,
) -> Result<ObservableTable>
where
    R: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    if n_particles == 0 {
        return Err(Error::InvalidInput("n_particles must be positive".into()));
    }
    if t_list.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || t_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("times must be finite, nonnegative and ascending".into()));
    }
    let mut table = ObservableTable {
        n_particles,
        seed,
        rows: Vec::new(),
        survival: Vec::new(),
    };
    for (k, cfg) in configs.iter().enumerate() {
        cfg.check_coupling()?;
        let bins = bin_count(cfg.dimension(), direction_bins);
        let stream = derive_seed(seed, k as u64);
        let traces: Vec<ParticleTrace> = (0..n_particles as u64)
            .into_par_iter()
            .map(|i| trace_particle(rho, t_list, cfg, tests, &mut substream(stream, i), bins))
            .collect::<Result<_>>()?;
        let total_weight: f64 = traces.iter().map(|p| p.weight).sum();
        for (ti, &t) in t_list.iter().enumerate() {
            for (j, test) in tests.iter().enumerate() {
                let spec: Vec<f64> = traces.iter().map(|p| p.specular[ti][j]).collect();
                let abs: Vec<f64> = traces.iter().map(|p| p.absorbing[ti][j]).collect();
                let (s, s_se) = mean_and_std_err(&spec);
                let (a, a_se) = mean_and_std_err(&abs);
                table.rows.push(ObservableRow {
                    epsilon: cfg.epsilon(),
                    t,
                    test: test.name.clone(),
                    specular: s,
                    specular_se: s_se,
                    absorbing: a,
                    absorbing_se: a_se,
                });
            }
            table.survival.push(survival_row(&traces, ti, t, cfg.epsilon(), total_weight, bins)?);
        }
    }
    Ok(table)
}

fn survival_row(
    traces: &[ParticleTrace],
    ti: usize,
    t: f64,
    epsilon: f64,
    total_weight: f64,
    bins: usize,
) -> Result<SurvivalRow> {
    let alive_weight: f64 = traces.iter().filter(|p| p.alive[ti]).map(|p| p.weight).sum();
    let survival = if total_weight > 0.0 { alive_weight / total_weight } else { 0.0 };
    let spread: f64 = traces
        .iter()
        .map(|p| {
            let d = p.weight * (f64::from(u8::from(p.alive[ti])) - survival);
            d * d
        })
        .sum();
    let std_err = if total_weight > 0.0 { spread.sqrt() / total_weight } else { 0.0 };

    let mut bin_weight = vec![0.0; bins];
    let mut bin_alive = vec![0.0; bins];
    for p in traces {
        bin_weight[p.bin] += p.weight;
        if p.alive[ti] {
            bin_alive[p.bin] += p.weight;
        }
    }
    let phis: Vec<f64> = bin_weight
        .iter()
        .zip(&bin_alive)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, a)| a / w)
        .collect();
    let (mut square_mean, mut mean) = (0.0, 0.0);
    if !phis.is_empty() {
        let q = 1.0 / phis.len() as f64;
        square_mean = phis.iter().map(|p| q * p * p).sum();
        mean = phis.iter().map(|p| q * p).sum();
    }
    let mean_square = mean * mean;
    if square_mean < mean_square * (1.0 - 1e-12) - 1e-300 {
        return Err(Error::InvariantViolation(format!(
            "Jensen comparison failed: {square_mean} < {mean_square}"
        )));
    }
    Ok(SurvivalRow {
        epsilon,
        t,
        survival,
        std_err,
        jensen_square_mean: square_mean,
        jensen_mean_square: mean_square,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::bump::{make_bump_rho, BumpProfile};

    #[test]
    fn total_mass_is_conserved_and_absorption_decays() {
        let bump = make_bump_rho(2, BumpProfile::CosineSquared, 2).unwrap();
        let rho = |x: &[f64], _: &[f64]| bump.eval(x);
        let cfgs = [
            LatticeConfig::boltzmann_grad(2, 1.0, 4).unwrap(),
            LatticeConfig::boltzmann_grad(2, 1.0, 8).unwrap(),
        ];
        let times = [0.0, 0.25, 0.5, 1.0, 2.0];
        let table =
            empirical_fe_observables(&rho, &times, &cfgs, &[TestFunction::one()], 4_000, 3, 8).unwrap();
        for eps in [0.25, 0.125] {
            let rows: Vec<&ObservableRow> = table.rows.iter().filter(|r| r.epsilon == eps).collect();
            assert_eq!(rows.len(), times.len());
            for r in &rows {
                assert_eq!(r.specular, rows[0].specular);
            }
            assert_eq!(rows[0].absorbing, rows[0].specular);
            assert!(rows.windows(2).all(|w| w[1].absorbing <= w[0].absorbing));
            let surv: Vec<&SurvivalRow> = table.survival.iter().filter(|r| r.epsilon == eps).collect();
            assert_eq!(surv[0].survival, 1.0);
            for (s, r) in surv.iter().zip(&rows) {
                assert!((s.survival * rows[0].specular - r.absorbing).abs() < 1e-12);
                assert!(s.jensen_square_mean >= s.jensen_mean_square * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn reproducible() {
        let rho = |_: &[f64], _: &[f64]| 1.0;
        let cfgs = [LatticeConfig::boltzmann_grad(3, 0.5, 3).unwrap()];
        let tests = [TestFunction::new("x0", |x, _| x[0] + 1.0)];
        let a = empirical_fe_observables(&rho, &[0.5, 1.0], &cfgs, &tests, 500, 9, 4).unwrap();
        let b = empirical_fe_observables(&rho, &[0.5, 1.0], &cfgs, &tests, 500, 9, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn direction_bins_cover_sectors() {
        assert_eq!(direction_bin(&[1.0, 0.0], 4), 0);
        assert_eq!(direction_bin(&[0.0, 1.0], 4), 1);
        assert_eq!(direction_bin(&[0.1, -1.0], 4), 3);
        assert_eq!(direction_bin(&[-0.5, 0.5, -0.7], 8), 0b101);
    }
}
