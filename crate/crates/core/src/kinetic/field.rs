//! Phase-space densities stored as spatial Fourier modes over velocity nodes.
//!
//! `f(x, v_j) = Σ_ξ f̂_ξ[j] e^{2πi ξ·x}` with `ξ ∈ {-M..M}^D`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::substream;

/// Dense mode cube `{-M..M}^D` of complex vectors over the velocity nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    pub dimension: usize,
    pub cutoff: usize,
    /// Quadrature weights of the velocity nodes.
    pub weights: Vec<f64>,
    /// Row-major over the mode cube; `modes[flat][j]`.
    pub modes: Vec<Vec<Complex64>>,
}

/// Frequency vector of a flat mode index.
pub fn mode_of(flat: usize, dimension: usize, cutoff: usize) -> Vec<i64> {
    let side = 2 * cutoff + 1;
    let mut rest = flat;
    let mut xi = vec![0; dimension];
    for slot in xi.iter_mut().rev() {
        *slot = (rest % side) as i64 - cutoff as i64;
        rest /= side;
    }
    xi
}

/// Flat index of `ξ`, or `None` outside the cube.
pub fn index_of(xi: &[i64], cutoff: usize) -> Option<usize> {
    let side = 2 * cutoff as i64 + 1;
    let mut flat = 0i64;
    for &c in xi {
        if c.abs() > cutoff as i64 {
            return None;
        }
        flat = flat * side + c + cutoff as i64;
    }
    Some(flat as usize)
}

/// Every frequency of the cube `{-M..M}^D`, in storage order.
pub fn mode_cube(dimension: usize, cutoff: usize) -> Vec<Vec<i64>> {
    let total = (2 * cutoff + 1).pow(dimension as u32);
    (0..total).map(|f| mode_of(f, dimension, cutoff)).collect()
}

impl KineticField {
    pub fn zeros(dimension: usize, cutoff: usize, weights: &[f64]) -> Self {
        let total = (2 * cutoff + 1).pow(dimension as u32);
        KineticField {
            dimension,
            cutoff,
            weights: weights.to_vec(),
            modes: vec![vec![Complex64::new(0.0, 0.0); weights.len()]; total],
        }
    }

    /// Field equal to `value` everywhere.
    pub fn constant(dimension: usize, cutoff: usize, weights: &[f64], value: f64) -> Self {
        let mut f = Self::zeros(dimension, cutoff, weights);
        let zero = f.zero_index();
        f.modes[zero].iter_mut().for_each(|c| *c = Complex64::new(value, 0.0));
        f
    }

    /// Random real-valued field (Hermitian modes) with unit distance to its
    /// equilibrium `⟨f⟩`.
    pub fn random(dimension: usize, cutoff: usize, weights: &[f64], seed: u64) -> Self {
        let mut rng = substream(seed, 0);
        let mut f = Self::zeros(dimension, cutoff, weights);
        let total = f.modes.len();
        let gauss = |rng: &mut crate::rng::SampleRng| -> f64 { StandardNormal.sample(rng) };
        for flat in 0..total {
            let partner = total - 1 - flat;
            if partner < flat {
                continue;
            }
            for j in 0..weights.len() {
                if partner == flat {
                    f.modes[flat][j] = Complex64::new(gauss(&mut rng), 0.0);
                } else {
                    let c = Complex64::new(gauss(&mut rng), gauss(&mut rng));
                    f.modes[flat][j] = c;
                    f.modes[partner][j] = c.conj();
                }
            }
        }
        let d = f.l2_distance_to_equilibrium();
        f.scale(1.0 / d);
        f
    }

    pub fn n_nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn zero_index(&self) -> usize {
        (self.modes.len() - 1) / 2
    }

    pub fn mode(&self, xi: &[i64]) -> Option<&[Complex64]> {
        index_of(xi, self.cutoff).map(|i| self.modes[i].as_slice())
    }

    pub fn mode_mut(&mut self, xi: &[i64]) -> Option<&mut Vec<Complex64>> {
        index_of(xi, self.cutoff).map(move |i| &mut self.modes[i])
    }

    pub fn frequencies(&self) -> Vec<Vec<i64>> {
        mode_cube(self.dimension, self.cutoff)
    }

    pub fn scale(&mut self, factor: f64) {
        for c in self.modes.iter_mut().flatten() {
            *c *= factor;
        }
    }

    /// Largest `|f̂_{-ξ} − conj(f̂_ξ)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let total = self.modes.len();
        let mut worst: f64 = 0.0;
        for flat in 0..total {
            let partner = total - 1 - flat;
            for (a, b) in self.modes[flat].iter().zip(&self.modes[partner]) {
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect > 1e-12 {
            return Err(Error::InvariantViolation(format!(
                "field is not real-valued: Hermitian defect {defect:.3e}"
            )));
        }
        Ok(())
    }

    /// Phase-space average `⟨f⟩ = Σ_j w_j Re f̂_0[j]`.
    pub fn average_braket(&self) -> f64 {
        self.modes[self.zero_index()]
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * c.re)
            .sum()
    }

    /// `‖f − ⟨f⟩‖_{L²(T^D × S^{D-1})}` by Parseval.
    pub fn l2_distance_to_equilibrium(&self) -> f64 {
        let avg = self.average_braket();
        let zero = self.zero_index();
        let mut sum = 0.0;
        for (flat, mode) in self.modes.iter().enumerate() {
            let shift = if flat == zero { avg } else { 0.0 };
            for (c, w) in mode.iter().zip(&self.weights) {
                sum += w * (c - shift).norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Values `f(x, v_j)` for every node at the point `x`.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_nodes()];
        for (flat, mode) in self.modes.iter().enumerate() {
            let xi = mode_of(flat, self.dimension, self.cutoff);
            let phase: f64 = xi.iter().zip(x).map(|(k, y)| *k as f64 * y).sum();
            let e = Complex64::from_polar(1.0, 2.0 * PI * phase);
            for (o, c) in out.iter_mut().zip(mode) {
                *o += (c * e).re;
            }
        }
        out
    }

    pub(crate) fn check_compatible(&self, n_nodes: usize) -> Result<()> {
        if self.n_nodes() != n_nodes {
            return Err(Error::DimensionMismatch(format!(
                "field has {} velocity nodes, kernel has {n_nodes}",
                self.n_nodes()
            )));
        }
        if self.modes.len() != (2 * self.cutoff + 1).pow(self.dimension as u32)
            || self.modes.iter().any(|m| m.len() != n_nodes)
        {
            return Err(Error::DimensionMismatch("mode storage does not match the cutoff".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::quadrature::velocity_nodes;

    #[test]
    fn indexing_round_trips() {
        for (d, m) in [(1, 3), (2, 2), (3, 1)] {
            for (flat, xi) in mode_cube(d, m).iter().enumerate() {
                assert_eq!(index_of(xi, m), Some(flat));
                let neg: Vec<i64> = xi.iter().map(|c| -c).collect();
                assert_eq!(index_of(&neg, m), Some(mode_cube(d, m).len() - 1 - flat));
            }
        }
        assert_eq!(index_of(&[3, 0], 2), None);
    }

    #[test]
    fn constant_field_sits_at_equilibrium() {
        let q = velocity_nodes(2, 8).unwrap();
        let f = KineticField::constant(2, 3, &q.weights, 1.0);
        assert!((f.average_braket() - 1.0).abs() < 1e-15);
        assert_eq!(f.l2_distance_to_equilibrium(), 0.0);
        let z = KineticField::zeros(2, 3, &q.weights);
        assert_eq!(z.average_braket(), 0.0);
    }

    #[test]
    fn velocity_perturbation_norm() {
        let q = velocity_nodes(2, 8).unwrap();
        let mut f = KineticField::constant(2, 2, &q.weights, 2.0);
        let zero = f.zero_index();
        let pert: Vec<f64> = q.nodes.iter().map(|v| v[0]).collect();
        for (c, p) in f.modes[zero].iter_mut().zip(&pert) {
            *c += p;
        }
        let expected = q.integrate(|v| v[0] * v[0]).sqrt();
        assert!((f.average_braket() - 2.0).abs() < 1e-15);
        assert!((f.l2_distance_to_equilibrium() - expected).abs() < 1e-14);
    }

    #[test]
    fn random_field_is_real_and_normalised() {
        let q = velocity_nodes(2, 8).unwrap();
        let f = KineticField::random(2, 3, &q.weights, 11);
        assert_eq!(f.hermitian_defect(), 0.0);
        assert!((f.l2_distance_to_equilibrium() - 1.0).abs() < 1e-14);
        assert_eq!(f, KineticField::random(2, 3, &q.weights, 11));
    }

    #[test]
    fn parseval_matches_grid_quadrature() {
        let q = velocity_nodes(2, 6).unwrap();
        let m = 3;
        let f = KineticField::random(2, m, &q.weights, 4);
        let avg = f.average_braket();
        // A (2M+1)-point grid integrates trigonometric polynomials of degree 2M exactly.
        let g = 2 * m + 1;
        let mut sum = 0.0;
        for a in 0..g {
            for b in 0..g {
                let x = [a as f64 / g as f64, b as f64 / g as f64];
                let vals = f.evaluate(&x);
                sum += vals
                    .iter()
                    .zip(&q.weights)
                    .map(|(v, w)| w * (v - avg).powi(2))
                    .sum::<f64>();
            }
        }
        let grid_norm = (sum / (g * g) as f64).sqrt();
        assert!((grid_norm - f.l2_distance_to_equilibrium()).abs() < 1e-8);
    }
}
