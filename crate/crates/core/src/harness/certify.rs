//! The non-convergence certificate: fitted tail and decay constants against
//! the lower/upper bound comparison for concentrated bump data.

use serde::{Deserialize, Serialize};

use crate::ensemble::TailBoundsEstimate;
use crate::error::{Error, Result};
use crate::harness::bounds::{contradiction_time, lower_bound_from_norm, upper_bound_from_norms};
use crate::harness::bump::{make_bump_rho, BumpInitialData, BumpProfile};
use crate::kinetic::DecayFit;

/// Run metadata carried into the report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seeds: Vec<u64>,
    pub n_samples: usize,
    #[serde(rename = "N_nodes")]
    pub n_nodes: usize,
    #[serde(rename = "M_modes")]
    pub m_modes: usize,
    /// Tail window the constant `C1` was read from.
    pub window: Option<[f64; 2]>,
    /// Scan horizon `T`.
    pub horizon: f64,
    /// `max_{t ∈ (1/r_*^{D-1}, T]} (C1/(t r_*^{D-1}) − c e^{-γt})`: a bump is
    /// feasible iff its `‖ρ‖₁/‖ρ‖₂` lies below this value.
    pub feasibility_bound: f64,
    /// Smallest `m` meeting the bound for the chosen profile, if any up to 2^20.
    pub feasibility_m_min: Option<u32>,
    /// `(m, ‖ρ‖₁/‖ρ‖₂, window found)` for every scheduled `m`.
    pub schedule: Vec<ScheduleEntry>,
    /// `certified` or `schedule_exhausted`.
    pub status: String,
    pub profile: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub m: u32,
    pub norm_ratio: f64,
    pub window: Option<[f64; 2]>,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonConvergenceReport {
    pub C1_emp: f64,
    pub c_fit: f64,
    pub gamma_fit: f64,
    pub r_star: f64,
    pub D: usize,
    pub m: Option<u32>,
    pub t_window: Option<[f64; 2]>,
    pub t_star: Option<f64>,
    pub margin_mid: Option<f64>,
    pub provenance: Provenance,
}

impl NonConvergenceReport {
    pub fn is_certified(&self) -> bool {
        self.t_window.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Scan horizon `T`; default `10 t_*`, or `10 / r_*^{D-1}` without `t_*`.
    pub horizon: Option<f64>,
    /// Number of scan points in `(1/r_*^{D-1}, T]`.
    pub scan_points: usize,
    pub profile: BumpProfile,
    pub provenance: Provenance,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            horizon: None,
            scan_points: 4000,
            profile: BumpProfile::CosineSquared,
            provenance: Provenance::default(),
        }
    }
}

/// The inequality constants and scan range shared by every `m`.
#[derive(Debug, Clone, Copy)]
struct Comparison {
    c1: f64,
    c: f64,
    gamma: f64,
    r_star: f64,
    dimension: usize,
    threshold: f64,
    horizon: f64,
}

impl Comparison {
    fn margin(&self, t: f64, data: &BumpInitialData) -> f64 {
        let lower = lower_bound_from_norm(t, self.c1, self.r_star, data.rho_l2, self.dimension)
            .expect("scan stays above the threshold");
        lower - upper_bound_from_norms(t, self.c, self.gamma, data.rho_l1, data.rho_l2)
    }

    /// Normalised margin `C1/(t r_*^{D-1}) − c e^{-γt}`, independent of `ρ`.
    fn reduced(&self, t: f64) -> f64 {
        self.c1 / (t * self.r_star.powi(self.dimension as i32 - 1)) - self.c * (-self.gamma * t).exp()
    }

    fn scan_times(&self, points: usize) -> Vec<f64> {
        let step = (self.horizon - self.threshold) / points as f64;
        (1..=points).map(|i| self.threshold + step * i as f64).collect()
    }

    /// First maximal run of positive margin, edges refined by bisection.
    fn window(&self, data: &BumpInitialData, times: &[f64]) -> Option<[f64; 2]> {
        let first = times.iter().position(|&t| self.margin(t, data) > 0.0)?;
        let last = first
            + times[first..]
                .iter()
                .take_while(|&&t| self.margin(t, data) > 0.0)
                .count()
            - 1;
        let lo = if first == 0 {
            self.refine(data, self.threshold * (1.0 + 1e-12), times[0])
        } else {
            self.refine(data, times[first - 1], times[first])
        };
        let hi = if last + 1 < times.len() {
            self.refine(data, times[last + 1], times[last])
        } else {
            times[last]
        };
        Some([lo, hi])
    }

    /// Bisects between a nonpositive-margin point `out` and a positive one `inside`.
    fn refine(&self, data: &BumpInitialData, mut out: f64, mut inside: f64) -> f64 {
        if self.margin(out, data) > 0.0 {
            return out;
        }
        for _ in 0..200 {
            if (inside - out).abs() <= 1e-12 * inside.abs() {
                break;
            }
            let mid = 0.5 * (out + inside);
            if self.margin(mid, data) > 0.0 {
                inside = mid;
            } else {
                out = mid;
            }
        }
        inside
    }
}

/// Scans each `m` of the schedule for times where `L(t) > U(t)`.
///
/// `C1 := tail.c_low`, `(c, γ) := (decay.c_fit, decay.gamma_fit)`. The first
/// `m` (in schedule order) with a nonempty window is reported; an exhausted
/// schedule is a report with `status = "schedule_exhausted"`, not an error.
pub fn certify_nonconvergence(
    tail: &TailBoundsEstimate,
    decay: &DecayFit,
    r_star: f64,
    dimension: usize,
    m_schedule: &[u32],
    opts: &CertifyOptions,
) -> Result<NonConvergenceReport> {
    let (c1, c, gamma) = (tail.c_low, decay.c_fit, decay.gamma_fit);
    if !(c1 > 0.0 && c > 0.0 && gamma > 0.0 && r_star > 0.0) {
        return Err(Error::InvalidInput(format!(
            "constants must be positive: C1={c1}, c={c}, gamma={gamma}, r_star={r_star}"
        )));
    }
    if opts.scan_points < 2 {
        return Err(Error::InvalidInput("need at least two scan points".into()));
    }
    let threshold = r_star.powi(dimension as i32 - 1).recip();
    let t_star = contradiction_time(c1, c, gamma, r_star, dimension);
    let horizon = opts
        .horizon
        .unwrap_or_else(|| t_star.map_or(10.0 * threshold, |t| 10.0 * t));
    if !(horizon > threshold) {
        return Err(Error::BelowThreshold {
            t: horizon,
            threshold,
        });
    }
    let cmp = Comparison {
        c1,
        c,
        gamma,
        r_star,
        dimension,
        threshold,
        horizon,
    };
    let times = cmp.scan_times(opts.scan_points);
    let feasibility_bound = times.iter().map(|&t| cmp.reduced(t)).fold(f64::NEG_INFINITY, f64::max);

    let mut schedule = Vec::with_capacity(m_schedule.len());
    let mut chosen: Option<(BumpInitialData, [f64; 2])> = None;
    for &m in m_schedule {
        let data = make_bump_rho(m, opts.profile.clone(), dimension)?;
        let window = cmp.window(&data, &times);
        schedule.push(ScheduleEntry {
            m,
            norm_ratio: data.norm_ratio(),
            window,
        });
        if let (None, Some(w)) = (&chosen, window) {
            chosen = Some((data, w));
        }
    }
    for a in &schedule {
        for b in &schedule {
            if b.m > a.m && a.window.is_some() && b.window.is_none() {
                return Err(Error::InvariantViolation(format!(
                    "m = {} has a window but larger m = {} does not",
                    a.m, b.m
                )));
            }
        }
    }

    let base = make_bump_rho(1, opts.profile.clone(), dimension)?;
    let feasibility_m_min = feasible_m_min(&base, feasibility_bound, dimension);

    let mut provenance = opts.provenance.clone();
    provenance.horizon = horizon;
    provenance.feasibility_bound = feasibility_bound;
    provenance.feasibility_m_min = feasibility_m_min;
    provenance.schedule = schedule;
    provenance.profile = opts.profile.name().to_string();
    provenance.version = crate::VERSION.to_string();
    provenance.status = if chosen.is_some() { "certified" } else { "schedule_exhausted" }.to_string();

    let (m, t_window, margin_mid) = match &chosen {
        Some((data, w)) => {
            let mid = 0.5 * (w[0] + w[1]);
            (Some(data.m), Some(*w), Some(cmp.margin(mid, data)))
        }
        None => (None, None, None),
    };
    Ok(NonConvergenceReport {
        C1_emp: c1,
        c_fit: c,
        gamma_fit: gamma,
        r_star,
        D: dimension,
        m,
        t_window,
        t_star,
        margin_mid,
        provenance,
    })
}

/// `‖ρ‖₁/‖ρ‖₂ = m^{-D/2} ‖b‖₁/‖b‖₂`, so the smallest feasible `m` is explicit.
fn feasible_m_min(base: &BumpInitialData, bound: f64, dimension: usize) -> Option<u32> {
    if !(bound > 0.0) {
        return None;
    }
    let ratio = base.norm_ratio();
    let m = (ratio / bound).powf(2.0 / dimension as f64);
    let mut candidate = m.floor().max(1.0) as u64;
    while (candidate as f64).powf(-(dimension as f64) / 2.0) * ratio >= bound {
        candidate += 1;
    }
    u32::try_from(candidate).ok().filter(|&c| c <= 1 << 20)
}
