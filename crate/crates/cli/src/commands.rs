use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use lorentz_core::billiard::{evolve_billiard, BoundaryLaw, DiffuseSampling};
use lorentz_core::ensemble::{
    check_bgw_bounds, estimate_survival, fit_tail_models, matched_poisson_intensity, phi_sampler,
    poisson_survival, two_scale_fourier_check, SurvivalCurve, Window,
};
use lorentz_core::harness::{certify_nonconvergence, CertifyOptions, Provenance};
use lorentz_core::io::{
    decay_csv, from_json, parse_grid, parse_kernel_table, parse_survival_csv, survival_csv, to_json,
    trace_csv, DecayReport, TailReport,
};
use lorentz_core::kinetic::{
    build_kernel, fit_decay, solve_linear_boltzmann, spectral_gap_cube, velocity_nodes, KernelKind,
    KineticField, SpectralReport,
};
use lorentz_core::rng::{derive_seed, substream};
use lorentz_core::{LatticeConfig, PhasePoint, VERSION};

use crate::{
    BoltzmannArgs, CertifyArgs, CliError, FieldKind, FplArgs, KineticArgs, LawKind, PoissonArgs,
    TailCheckArgs, TraceArgs, TwoScaleArgs,
};

type CliResult<T = ()> = Result<T, CliError>;

/// JSON body preceded by the version and the parameters that produced it.
#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    version: &'a str,
    command: &'a str,
    params: BTreeMap<&'a str, String>,
    #[serde(flatten)]
    body: &'a T,
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn grid(spec: &str) -> CliResult<Vec<f64>> {
    parse_grid(spec).map_err(|e| CliError::Usage(e.to_string()))
}

fn unit(v: &[f64], what: &str) -> CliResult<Vec<f64>> {
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(CliError::Usage(format!("{what} must be a nonzero vector")));
    }
    Ok(v.iter().map(|c| c / norm).collect())
}

fn survival_curve(dim: usize, radius: f64, samples: usize, t_grid: &str, t_max: Option<f64>, seed: u64) -> CliResult<SurvivalCurve> {
    let cfg = LatticeConfig::new(dim, radius)?;
    let grid = grid(t_grid)?;
    let t_max = t_max.unwrap_or(grid[grid.len() - 1]);
    Ok(estimate_survival(&cfg, samples, &grid, t_max, seed)?)
}

pub fn fpl(a: FplArgs) -> CliResult {
    let curve = survival_curve(a.dim, a.radius, a.samples, &a.t_grid, a.t_max, a.seed)?;
    emit(a.out.as_deref(), &survival_csv(&curve))
}

pub fn poisson_fpl(a: PoissonArgs) -> CliResult {
    LatticeConfig::new(a.dim, a.radius)?;
    let grid = grid(&a.t_grid)?;
    let intensity = a.intensity.unwrap_or_else(|| matched_poisson_intensity(a.dim, a.radius));
    let curve = poisson_survival(intensity, a.radius, a.dim, a.samples, &grid, a.seed)?;
    emit(a.out.as_deref(), &survival_csv(&curve))
}

fn tail_report(curve: &SurvivalCurve, window: Option<(f64, f64)>) -> CliResult<TailReport> {
    let window = match window {
        Some((lo, hi)) => Window::new(lo, hi)?,
        None => Window::default_tail(curve.dimension, curve.radius),
    };
    let bounds = check_bgw_bounds(curve, window)?;
    let fit = fit_tail_models(curve, window)?;
    Ok(TailReport::new(curve, &bounds, &fit))
}

pub fn tail_check(a: TailCheckArgs) -> CliResult {
    let curve = parse_survival_csv(&read(&a.input)?)?;
    let report = tail_report(&curve, a.window)?;
    emit(a.out.as_deref(), &to_json(&report)?)
}

/// Decay trace, its fit and the spectral report of one relaxation run.
struct KineticRun {
    times: Vec<f64>,
    distances: Vec<f64>,
    decay: DecayReport,
    spectral: SpectralReport,
}

fn kernel_kind(spec: &str) -> CliResult<KernelKind> {
    if spec == "uniform" {
        return Ok(KernelKind::Uniform);
    }
    match spec.strip_prefix("file:") {
        Some(path) => Ok(KernelKind::Custom(parse_kernel_table(&read(Path::new(path))?)?)),
        None => Err(CliError::Usage(format!("kernel must be `uniform` or `file:PATH`, got `{spec}`"))),
    }
}

fn run_kinetic(dim: usize, k: &KineticArgs, seed: u64) -> CliResult<KineticRun> {
    if k.t_count < 2 {
        return Err(CliError::Usage("--t-count must be at least 2".into()));
    }
    let quad = velocity_nodes(dim, k.nodes)?;
    let kernel = build_kernel(kernel_kind(&k.kernel)?, k.sigma, &quad)?;
    let f_in = KineticField::random(dim, k.modes, &quad.weights, seed);
    let step = k.t_final / (k.t_count - 1) as f64;
    let times: Vec<f64> = (0..k.t_count).map(|i| i as f64 * step).collect();
    let distances: Vec<f64> = solve_linear_boltzmann(&f_in, &kernel, &times)?
        .iter()
        .map(KineticField::l2_distance_to_equilibrium)
        .collect();
    let fit = fit_decay(&times, &distances, Some(k.fit_window))?;
    let spectral = spectral_gap_cube(&kernel, k.modes)?;
    let decay = DecayReport {
        c_fit: fit.c_fit,
        gamma_fit: fit.gamma_fit,
        residual: fit.residual,
        window: [fit.window.0, fit.window.1],
        spectral_gap: spectral.gap,
        D: dim,
        N: k.nodes,
        M: k.modes,
        sigma: k.sigma,
        kernel: k.kernel.clone(),
        seed,
        version: VERSION.to_string(),
    };
    Ok(KineticRun {
        times,
        distances,
        decay,
        spectral,
    })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn boltzmann(a: BoltzmannArgs) -> CliResult {
    let run = run_kinetic(a.dim, &a.kinetic, a.seed)?;
    let k = &a.kinetic;
    let meta = [
        ("D", a.dim.to_string()),
        ("N", k.nodes.to_string()),
        ("M", k.modes.to_string()),
        ("sigma", k.sigma.to_string()),
        ("kernel", k.kernel.clone()),
        ("seed", a.seed.to_string()),
    ];
    emit(
        Some(&with_suffix(&a.out_prefix, "_decay.csv")),
        &decay_csv(&meta, &run.times, &run.distances),
    )?;
    emit(Some(&with_suffix(&a.out_prefix, "_decay.json")), &to_json(&run.decay)?)?;
    let spectral = Stamped {
        version: VERSION,
        command: "boltzmann",
        params: meta.iter().map(|(k, v)| (*k, v.clone())).collect(),
        body: &run.spectral,
    };
    emit(Some(&with_suffix(&a.out_prefix, "_spectral.json")), &to_json(&spectral)?)
}

/// `r_*` from the flags, checked against the tail radius when both are given.
fn resolve_r_star(a: &CertifyArgs, dim: usize, radius: f64) -> CliResult<f64> {
    let from_eps = a.epsilon.map(|eps| radius / eps.powf(1.0 / (dim as f64 - 1.0)));
    match (a.r_star, from_eps) {
        (Some(rs), Some(re)) if (rs - re).abs() > 1e-9 * rs.abs() => Err(CliError::Runtime(format!(
            "inconsistent r_star: --r-star {rs} but r = {radius}, epsilon = {} give {re}",
            a.epsilon.unwrap_or_default()
        ))),
        (Some(rs), _) => Ok(rs),
        (None, Some(re)) => Ok(re),
        (None, None) => Err(CliError::Usage("certify needs --epsilon or --r-star".into())),
    }
}

pub fn certify(a: CertifyArgs) -> CliResult {
    let (tail, decay, seeds) = if a.full {
        let (dim, radius) = (a.dim.unwrap_or_default(), a.radius.unwrap_or_default());
        let t_grid = a.t_grid.as_deref().unwrap_or_default();
        let curve = survival_curve(dim, radius, a.samples, t_grid, a.t_max, a.seed)?;
        let tail = tail_report(&curve, a.window)?;
        let kinetic_seed = derive_seed(a.seed, 1);
        let run = run_kinetic(dim, &a.kinetic, kinetic_seed)?;
        (tail, run.decay, vec![a.seed, kinetic_seed])
    } else {
        let (Some(tail_path), Some(decay_path)) = (&a.tail_json, &a.decay_json) else {
            return Err(CliError::Usage("certify needs --tail-json and --decay-json, or --full".into()));
        };
        let tail: TailReport = from_json(&read(tail_path)?)?;
        let decay: DecayReport = from_json(&read(decay_path)?)?;
        let seeds = vec![tail.seed, decay.seed];
        (tail, decay, seeds)
    };
    if tail.D != decay.D {
        return Err(CliError::Runtime(format!(
            "inconsistent dimension: tail has D = {}, decay has D = {}",
            tail.D, decay.D
        )));
    }
    let r_star = resolve_r_star(&a, tail.D, tail.r)?;
    let opts = CertifyOptions {
        horizon: a.horizon,
        scan_points: a.scan_points,
        provenance: Provenance {
            seeds,
            n_samples: tail.n_samples,
            n_nodes: decay.N,
            m_modes: decay.M,
            window: Some(tail.window),
            ..Provenance::default()
        },
        ..CertifyOptions::default()
    };
    let report = certify_nonconvergence(&tail.bounds(), &decay.fit(), r_star, tail.D, &a.m_schedule, &opts)?;
    emit(a.out.as_deref(), &to_json(&report)?)
}

pub fn two_scale(a: TwoScaleArgs) -> CliResult {
    let n = usize::try_from(a.n).map_err(|_| CliError::Usage("--n is too large".into()))?;
    let mut params = BTreeMap::from([
        ("D", a.dim.to_string()),
        ("n", a.n.to_string()),
        ("grid", a.grid.to_string()),
    ]);
    let report = match a.field {
        FieldKind::Cos => {
            params.insert("field", "cos".into());
            two_scale_fourier_check(n, |y: &[f64]| (2.0 * PI * y[0]).cos(), a.dim, a.grid)?
        }
        FieldKind::Phi => {
            if a.velocity.len() != a.dim {
                return Err(CliError::Usage(format!("--velocity needs {} components", a.dim)));
            }
            let v = unit(&a.velocity, "--velocity")?;
            let cfg = LatticeConfig::boltzmann_grad(a.dim, a.r_star, a.n)?;
            params.insert("field", "phi".into());
            params.insert("t", a.t.to_string());
            params.insert("r_star", a.r_star.to_string());
            params.insert("v", format!("{v:?}"));
            two_scale_fourier_check(n, phi_sampler(a.t, &v, &cfg), a.dim, a.grid)?
        }
    };
    let stamped = Stamped {
        version: VERSION,
        command: "two-scale",
        params,
        body: &report,
    };
    emit(a.out.as_deref(), &to_json(&stamped)?)
}

pub fn trace(a: TraceArgs) -> CliResult {
    if a.position.len() != a.velocity.len() {
        return Err(CliError::Usage("--position and --velocity must have equal length".into()));
    }
    let dim = a.position.len();
    let cfg = LatticeConfig::new(dim, a.radius)?;
    let start = PhasePoint::new(a.position.clone(), unit(&a.velocity, "--velocity")?);
    let (law, name) = match a.law {
        LawKind::Specular => (BoundaryLaw::Specular, "specular"),
        LawKind::DiffuseUniform => (BoundaryLaw::Diffuse(DiffuseSampling::Uniform), "diffuse-uniform"),
        LawKind::DiffuseCosine => (BoundaryLaw::Diffuse(DiffuseSampling::Cosine), "diffuse-cosine"),
    };
    let traj = evolve_billiard(&start, a.t, &cfg, law, &mut substream(a.seed, 0), a.max_events)?;
    let meta = [
        ("D", dim.to_string()),
        ("r", a.radius.to_string()),
        ("t", a.t.to_string()),
        ("law", name.to_string()),
        ("seed", a.seed.to_string()),
    ];
    emit(a.out.as_deref(), &trace_csv(&meta, &start, a.t, &traj))
}
