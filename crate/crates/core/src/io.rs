//! Text formats shared by the command-line tool: `#`-headed CSV tables and
//! JSON reports.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a file
//! read back reproduces the values bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::billiard::Trajectory;
use crate::ensemble::{
    geometric_grid, linear_grid, CurveModel, ModelFit, SurvivalCurve, TailBoundsEstimate, Window,
};
use crate::error::{Error, Result};
use crate::kinetic::DecayFit;
use crate::lattice::PhasePoint;
use crate::VERSION;

/// Parses `geometric:lo:hi:count`, `linear:lo:hi:count` or `list:t1,t2,...`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("grid `{spec}`: expected KIND:...")))?;
    if kind == "list" {
        let grid = rest.split(',').map(|s| parse_f64(s.trim(), "grid value")).collect::<Result<Vec<_>>>()?;
        if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse(format!("grid `{spec}` must be strictly ascending")));
        }
        return Ok(grid);
    }
    let parts: Vec<&str> = rest.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(Error::Parse(format!("grid `{spec}`: expected {kind}:lo:hi:count")));
    };
    let lo = parse_f64(lo, "grid lower end")?;
    let hi = parse_f64(hi, "grid upper end")?;
    let count: usize = count
        .parse()
        .map_err(|_| Error::Parse(format!("grid count `{count}` is not a positive integer")))?;
    match kind {
        "geometric" => geometric_grid(lo, hi, count),
        "linear" => linear_grid(lo, hi, count),
        _ => Err(Error::Parse(format!("unknown grid kind `{kind}`"))),
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("{what} `{s}` is not a number")))
}

/// `key=value` pairs from every `#` line of a CSV file.
pub fn parse_metadata(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.strip_prefix('#'))
        .flat_map(|l| l.split_whitespace())
        .filter_map(|tok| tok.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn meta_value<T: std::str::FromStr>(meta: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let raw = meta
        .get(key)
        .ok_or_else(|| Error::Parse(format!("missing `# {key}=` header")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("bad value `{raw}` for header `{key}`")))
}

/// Header row and numeric body of a CSV table; `#` lines are skipped.
fn parse_table(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header row".into()))?;
    let found: Vec<&str> = first.split(',').map(str::trim).collect();
    if found != header {
        return Err(Error::Parse(format!(
            "expected header `{}`, found `{first}`",
            header.join(",")
        )));
    }
    lines
        .map(|(n, line)| {
            let row = line
                .split(',')
                .map(|s| parse_f64(s.trim(), &format!("line {}", n + 1)))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != header.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, found {}",
                    n + 1,
                    header.len(),
                    row.len()
                )));
            }
            Ok(row)
        })
        .collect()
}

/// CSV with header `t,survival,std_err` and `#` provenance lines.
pub fn survival_csv(curve: &SurvivalCurve) -> String {
    let mut out = String::new();
    let model = match curve.model {
        CurveModel::Periodic => "model=periodic".to_string(),
        CurveModel::Poisson { intensity } => format!("model=poisson intensity={intensity}"),
        CurveModel::Synthetic => "model=synthetic".to_string(),
    };
    let _ = writeln!(out, "# lorentz version={VERSION} {model}");
    let _ = writeln!(
        out,
        "# D={} r={} n={} seed={} t_max={} censored_frac={}",
        curve.dimension, curve.radius, curve.n_samples, curve.seed, curve.t_max, curve.censored_fraction
    );
    out.push_str("t,survival,std_err\n");
    for ((t, s), e) in curve.times.iter().zip(&curve.survival).zip(&curve.std_err) {
        let _ = writeln!(out, "{t},{s},{e}");
    }
    out
}

pub fn parse_survival_csv(text: &str) -> Result<SurvivalCurve> {
    let meta = parse_metadata(text);
    let rows = parse_table(text, &["t", "survival", "std_err"])?;
    if rows.is_empty() {
        return Err(Error::Parse("survival table has no rows".into()));
    }
    let model = match meta.get("model").map(String::as_str) {
        None | Some("periodic") => CurveModel::Periodic,
        Some("poisson") => CurveModel::Poisson {
            intensity: meta_value(&meta, "intensity")?,
        },
        Some("synthetic") => CurveModel::Synthetic,
        Some(other) => return Err(Error::Parse(format!("unknown model `{other}`"))),
    };
    let curve = SurvivalCurve {
        times: rows.iter().map(|r| r[0]).collect(),
        survival: rows.iter().map(|r| r[1]).collect(),
        std_err: rows.iter().map(|r| r[2]).collect(),
        n_samples: meta_value(&meta, "n")?,
        t_max: meta_value(&meta, "t_max")?,
        dimension: meta_value(&meta, "D")?,
        radius: meta_value(&meta, "r")?,
        seed: meta_value(&meta, "seed")?,
        censored_fraction: meta_value(&meta, "censored_frac")?,
        model,
    };
    if curve.times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parse("times must be strictly ascending".into()));
    }
    if curve.survival.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(Error::Parse("survival values must lie in [0, 1]".into()));
    }
    Ok(curve)
}

/// Relaxation trace with header `t,l2_distance`; `meta` goes into a `#` line.
pub fn decay_csv(meta: &[(&str, String)], times: &[f64], distances: &[f64]) -> String {
    let mut out = format!("# lorentz version={VERSION}");
    for (k, v) in meta {
        let _ = write!(out, " {k}={v}");
    }
    out.push_str("\nt,l2_distance\n");
    for (t, d) in times.iter().zip(distances) {
        let _ = writeln!(out, "{t},{d}");
    }
    out
}

pub fn parse_decay_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = parse_table(text, &["t", "l2_distance"])?;
    Ok(rows.into_iter().map(|r| (r[0], r[1])).unzip())
}

/// One row per event: the start, each collision (hit point and outgoing
/// velocity) and the end state, all in the unfolded frame of the start.
pub fn trace_csv(meta: &[(&str, String)], start: &PhasePoint, t_final: f64, traj: &Trajectory) -> String {
    let d = start.dimension();
    let mut out = format!("# lorentz version={VERSION}");
    for (k, v) in meta {
        let _ = write!(out, " {k}={v}");
    }
    out.push_str("\nt");
    for prefix in ["x", "v"] {
        for i in 1..=d {
            let _ = write!(out, ",{prefix}{i}");
        }
    }
    out.push_str(",event\n");
    let mut row = |t: f64, x: &[f64], v: &[f64], event: &str| {
        let _ = write!(out, "{t}");
        for c in x.iter().chain(v) {
            let _ = write!(out, ",{c}");
        }
        let _ = writeln!(out, ",{event}");
    };
    row(0.0, &start.position, &start.velocity, "start");
    for e in &traj.events {
        row(e.time, &e.hit_point, &e.velocity_out, "collision");
    }
    row(t_final, &traj.unfolded_position(), &traj.state.velocity, "end");
    out
}

/// Whitespace- or comma-separated square table of kernel values; `#` starts
/// a comment.
pub fn parse_kernel_table(text: &str) -> Result<Vec<Vec<f64>>> {
    let rows = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| parse_f64(s, &format!("kernel row {}", i + 1)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::Parse(format!(
            "kernel table must be square, found {} rows of lengths {:?}",
            rows.len(),
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(rows)
}

/// Output of a tail check.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub c_low: f64,
    pub c_high: f64,
    pub spread: f64,
    pub power_r2: f64,
    pub exp_r2: f64,
    pub power_exponent: f64,
    pub exp_rate: f64,
    pub window: [f64; 2],
    pub n_points: usize,
    pub D: usize,
    pub r: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub version: String,
}

impl TailReport {
    pub fn new(curve: &SurvivalCurve, bounds: &TailBoundsEstimate, fit: &ModelFit) -> Self {
        TailReport {
            c_low: bounds.c_low,
            c_high: bounds.c_high,
            spread: bounds.spread,
            power_r2: fit.power_r2,
            exp_r2: fit.exp_r2,
            power_exponent: fit.power_exponent,
            exp_rate: fit.exp_rate,
            window: [bounds.window.lo, bounds.window.hi],
            n_points: bounds.n_points,
            D: curve.dimension,
            r: curve.radius,
            n_samples: curve.n_samples,
            seed: curve.seed,
            version: VERSION.to_string(),
        }
    }

    pub fn bounds(&self) -> TailBoundsEstimate {
        TailBoundsEstimate {
            window: Window {
                lo: self.window[0],
                hi: self.window[1],
            },
            c_low: self.c_low,
            c_high: self.c_high,
            spread: self.spread,
            n_points: self.n_points,
        }
    }
}

/// Output of a relaxation run: the decay fit and its setting.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub c_fit: f64,
    pub gamma_fit: f64,
    pub residual: f64,
    pub window: [f64; 2],
    pub spectral_gap: f64,
    pub D: usize,
    pub N: usize,
    pub M: usize,
    pub sigma: f64,
    pub kernel: String,
    pub seed: u64,
    pub version: String,
}

impl DecayReport {
    pub fn fit(&self) -> DecayFit {
        DecayFit {
            c_fit: self.c_fit,
            gamma_fit: self.gamma_fit,
            residual: self.residual,
            window: (self.window[0], self.window[1]),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
