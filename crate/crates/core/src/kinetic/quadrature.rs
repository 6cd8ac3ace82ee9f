//! Discrete velocity sets on the unit sphere.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes on `S^{D-1}` with positive weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityQuadrature {
    pub dimension: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl VelocityQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of `f` against the normalised sphere measure.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(v, w)| w * f(v)).sum()
    }

    /// Index of `-v` for every node.
    pub fn antipodes(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .map(|v| {
                self.nodes
                    .iter()
                    .position(|u| u.iter().zip(v).all(|(a, b)| *a == -*b))
                    .expect("node set closed under negation")
            })
            .collect()
    }
}

/// Velocity quadrature with `n` nodes per great circle.
///
/// * `D = 2`: the angles `2πj/n`, equal weights.
/// * `D = 3`: `n/2` Gauss-Legendre nodes in `cos θ` times `n` azimuths
///   `(j + 1/2)·2π/n`, i.e. `n²/2` nodes.
///
/// Antipodal nodes are exact negations of each other with equal weights.
pub fn velocity_nodes(dimension: usize, n: usize) -> Result<VelocityQuadrature> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("node count must be even and >= 2, got {n}")));
    }
    match dimension {
        2 => Ok(circle_nodes(n)),
        3 => sphere_nodes(n / 2, n),
        d => Err(Error::InvalidInput(format!(
            "velocity quadrature supports D = 2 or 3, got {d}"
        ))),
    }
}

fn circle_nodes(n: usize) -> VelocityQuadrature {
    let half = n / 2;
    let mut nodes: Vec<Vec<f64>> = (0..half)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / n as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    let negated: Vec<Vec<f64>> = nodes.iter().map(|v| v.iter().map(|c| -c).collect()).collect();
    nodes.extend(negated);
    VelocityQuadrature {
        dimension: 2,
        nodes,
        weights: vec![1.0 / n as f64; n],
    }
}

/// Product rule with `polar` Gauss-Legendre nodes and `azimuth` angles.
pub fn sphere_nodes(polar: usize, azimuth: usize) -> Result<VelocityQuadrature> {
    if polar == 0 || azimuth < 2 || !azimuth.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "sphere rule needs polar >= 1 and even azimuth >= 2, got {polar} x {azimuth}"
        )));
    }
    let degree = NonZeroUsize::new(polar).expect("polar > 0");
    let mut gl: Vec<(f64, f64)> = GaussLegendre::new(degree).as_node_weight_pairs().to_vec();
    gl.sort_by(|a, b| a.0.total_cmp(&b.0));
    for i in 0..polar / 2 {
        let j = polar - 1 - i;
        let mu = 0.5 * (gl[j].0 - gl[i].0);
        let w = 0.5 * (gl[i].1 + gl[j].1);
        gl[i] = (-mu, w);
        gl[j] = (mu, w);
    }
    if polar % 2 == 1 {
        gl[polar / 2].0 = 0.0;
    }
    let total = polar * azimuth;
    let mut nodes = vec![Vec::new(); total];
    let mut weights = vec![0.0; total];
    for (i, &(mu, wmu)) in gl.iter().enumerate() {
        let s = (1.0 - mu * mu).max(0.0).sqrt();
        for j in 0..azimuth {
            let idx = i * azimuth + j;
            let partner = (polar - 1 - i) * azimuth + (j + azimuth / 2) % azimuth;
            weights[idx] = wmu / azimuth as f64;
            if partner < idx {
                nodes[idx] = nodes[partner].iter().map(|c: &f64| -c).collect();
            } else {
                let phi = (j as f64 + 0.5) * 2.0 * PI / azimuth as f64;
                nodes[idx] = vec![s * phi.cos(), s * phi.sin(), mu];
            }
        }
    }
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Ok(VelocityQuadrature {
        dimension: 3,
        nodes,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_valid(q: &VelocityQuadrature) {
        let sum: f64 = q.weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
        assert!(q.weights.iter().all(|w| *w > 0.0));
        for v in &q.nodes {
            let n: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
        let anti = q.antipodes();
        for (i, &j) in anti.iter().enumerate() {
            assert_eq!(q.weights[i], q.weights[j]);
        }
    }

    #[test]
    fn four_circle_nodes() {
        let q = velocity_nodes(2, 4).unwrap();
        let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (v, e) in q.nodes.iter().zip(expected) {
            assert!((v[0] - e[0]).abs() < 1e-15 && (v[1] - e[1]).abs() < 1e-15);
        }
        assert_eq!(q.weights, vec![0.25; 4]);
        assert_valid(&q);
    }

    #[test]
    fn rules_are_symmetric_and_normalised() {
        for n in [2, 6, 8, 32, 64] {
            assert_valid(&velocity_nodes(2, n).unwrap());
            assert_valid(&velocity_nodes(3, n).unwrap());
        }
        assert_valid(&sphere_nodes(3, 4).unwrap());
    }

    #[test]
    fn sphere_moments() {
        let q = velocity_nodes(3, 16).unwrap();
        assert_eq!(q.len(), 8 * 16);
        for a in 0..3 {
            assert!(q.integrate(|v| v[a]).abs() < 1e-10);
            for b in 0..3 {
                let m = q.integrate(|v| v[a] * v[b]);
                let target = if a == b { 1.0 / 3.0 } else { 0.0 };
                assert!((m - target).abs() < 1e-10, "({a},{b}): {m}");
            }
        }
    }

    #[test]
    fn circle_moments() {
        let q = velocity_nodes(2, 32).unwrap();
        assert!((q.integrate(|v| v[0] * v[0]) - 0.5).abs() < 1e-14);
        assert!(q.integrate(|v| v[0] * v[1]).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(velocity_nodes(2, 5).is_err());
        assert!(velocity_nodes(4, 8).is_err());
        assert!(velocity_nodes(3, 0).is_err());
    }
}
