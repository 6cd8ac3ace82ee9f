use std::f64::consts::PI;

use lorentz_core::harness::{make_bump_rho, BumpProfile};
use lorentz_core::kinetic::{
    build_kernel, fit_decay, solve_linear_boltzmann, spectral_gap_cube, velocity_nodes, KernelKind,
    KineticField,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// Classical RK4 for `y' = −2πi (ξ·v_j) y_j − σ y_j + σ Σ_k w_k y_k`
/// (uniform kernel), assembled without the library's generator.
fn rk4_mode(xi: &[f64], nodes: &[Vec<f64>], w: &[f64], sigma: f64, y0: &[Complex64], t: f64, h: f64) -> Vec<Complex64> {
    let drift: Vec<Complex64> = nodes
        .iter()
        .map(|v| Complex64::new(-sigma, -2.0 * PI * xi.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()))
        .collect();
    let rhs = |y: &[Complex64]| -> Vec<Complex64> {
        let gain: Complex64 = y.iter().zip(w).map(|(a, b)| a * b).sum::<Complex64>() * sigma;
        y.iter().zip(&drift).map(|(a, d)| a * d + gain).collect()
    };
    let axpy = |y: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        y.iter().zip(k).map(|(a, b)| a + b * s).collect()
    };
    let steps = (t / h).round() as usize;
    let mut y = y0.to_vec();
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&axpy(&y, &k1, h / 2.0));
        let k3 = rhs(&axpy(&y, &k2, h / 2.0));
        let k4 = rhs(&axpy(&y, &k3, h));
        for i in 0..y.len() {
            y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    y
}

#[test]
fn single_mode_matches_runge_kutta() {
    let q = velocity_nodes(2, 16).unwrap();
    let kernel = build_kernel(KernelKind::Uniform, 1.0, &q).unwrap();
    let f = KineticField::random(2, 1, &q.weights, 17);
    let out = solve_linear_boltzmann(&f, &kernel, &[0.0, 1.0]).unwrap();
    let got = out[1].mode(&[1, 0]).unwrap();
    let y0 = f.mode(&[1, 0]).unwrap();
    let coarse = rk4_mode(&[1.0, 0.0], &q.nodes, &q.weights, 1.0, y0, 1.0, 2e-4);
    let fine = rk4_mode(&[1.0, 0.0], &q.nodes, &q.weights, 1.0, y0, 1.0, 1e-4);
    for ((g, c), f) in got.iter().zip(&coarse).zip(&fine) {
        assert!((c - f).norm() < 1e-10, "oracle not converged");
        assert!((g - f).norm() < 1e-6, "{g} vs {f}");
    }
}

#[test]
fn band_limited_nonnegative_data_stays_nonnegative() {
    let q = velocity_nodes(2, 16).unwrap();
    let kernel = build_kernel(KernelKind::Uniform, 1.0, &q).unwrap();
    let m = 2;
    // f = 1 + 4a(v) cos(2πx₁) cos(2πx₂) with 0 ≤ 4a ≤ 1.
    let mut f = KineticField::constant(2, m, &q.weights, 1.0);
    for (j, v) in q.nodes.iter().enumerate() {
        let a = 0.125 * (1.0 + v[0]);
        for xi in [[1i64, 1], [-1, -1], [1, -1], [-1, 1]] {
            f.mode_mut(&xi).unwrap()[j] = Complex64::new(a, 0.0);
        }
    }
    let times: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    let out = solve_linear_boltzmann(&f, &kernel, &times).unwrap();
    let g = 24;
    for field in &out {
        for a in 0..g {
            for b in 0..g {
                let x = [a as f64 / g as f64, b as f64 / g as f64];
                for val in field.evaluate(&x) {
                    assert!(val >= -1e-8, "{val}");
                }
            }
        }
    }
}

#[test]
fn gap_and_fit_agree_on_a_coarse_setting() {
    let q = velocity_nodes(2, 16).unwrap();
    let kernel = build_kernel(KernelKind::Uniform, 1.0, &q).unwrap();
    let f = KineticField::random(2, 4, &q.weights, 3);
    let times: Vec<f64> = (0..=150).map(|i| 0.1 * i as f64).collect();
    let d: Vec<f64> = solve_linear_boltzmann(&f, &kernel, &times)
        .unwrap()
        .iter()
        .map(KineticField::l2_distance_to_equilibrium)
        .collect();
    let fit = fit_decay(&times, &d, Some((3.0, 15.0))).unwrap();
    let gap = spectral_gap_cube(&kernel, 4).unwrap().gap;
    assert!(fit.gamma_fit > 0.0 && gap > 0.0);
    // The fitted rate can only exceed the slowest rate present in the data.
    assert!(fit.gamma_fit > gap * 0.95, "{} vs {gap}", fit.gamma_fit);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mass_and_contraction(d in 2usize..4, cutoff in 1usize..3, sigma in 0.2f64..3.0, seed in any::<u64>()) {
        let nodes = if d == 2 { 12 } else { 16 };
        let q = velocity_nodes(d, nodes).unwrap();
        let aniso: Vec<Vec<f64>> = q.nodes.iter()
            .map(|v| q.nodes.iter().map(|w| 1.0 + 0.5 * v.iter().zip(w).map(|(a, b)| a * b).sum::<f64>()).collect())
            .collect();
        for kind in [KernelKind::Uniform, KernelKind::Custom(aniso)] {
            let kernel = build_kernel(kind, sigma, &q).unwrap();
            let f = KineticField::random(d, cutoff, &q.weights, seed);
            let times: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
            let out = solve_linear_boltzmann(&f, &kernel, &times).unwrap();
            let mass = f.average_braket();
            let mut prev = f64::INFINITY;
            for g in &out {
                prop_assert!((g.average_braket() - mass).abs() < 1e-12);
                let dist = g.l2_distance_to_equilibrium();
                prop_assert!(dist <= prev * (1.0 + 1e-12));
                prev = dist;
                prop_assert!(g.hermitian_defect() <= 1e-12);
            }
        }
    }

    #[test]
    fn constants_are_fixed(d in 2usize..4, c in -3.0f64..3.0, t in 0.0f64..50.0) {
        let q = velocity_nodes(d, 8).unwrap();
        let kernel = build_kernel(KernelKind::Uniform, 1.3, &q).unwrap();
        let f = KineticField::constant(d, 2, &q.weights, c);
        let out = solve_linear_boltzmann(&f, &kernel, &[t]).unwrap();
        for (a, b) in out[0].modes.iter().flatten().zip(f.modes.iter().flatten()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_on_random_fields(d in 2usize..4, cutoff in 1usize..3, seed in any::<u64>()) {
        let q = velocity_nodes(d, 8).unwrap();
        let f = KineticField::random(d, cutoff, &q.weights, seed);
        let avg = f.average_braket();
        let g = 2 * cutoff + 1;
        let total = g.pow(d as u32);
        let mut sum = 0.0;
        for flat in 0..total {
            let mut rest = flat;
            let x: Vec<f64> = (0..d).map(|_| { let j = rest % g; rest /= g; j as f64 / g as f64 }).collect();
            sum += f.evaluate(&x).iter().zip(&q.weights).map(|(v, w)| w * (v - avg).powi(2)).sum::<f64>();
        }
        prop_assert!(((sum / total as f64).sqrt() - f.l2_distance_to_equilibrium()).abs() < 1e-8);
    }

    #[test]
    fn bump_mass_matches_quadrature(m in 1u32..6) {
        let b = make_bump_rho(m, BumpProfile::CosineSquared, 2).unwrap();
        let q = velocity_nodes(2, 4).unwrap();
        let f = b.to_kinetic_field(4 * m as usize, &q.weights);
        prop_assert!((f.average_braket() - b.rho_l1).abs() < 1e-10);
        // Midpoint rule on a fine grid.
        let g = 400;
        let mut mass = 0.0;
        for i in 0..g {
            for j in 0..g {
                mass += b.eval(&[(i as f64 + 0.5) / g as f64 - 0.5, (j as f64 + 0.5) / g as f64 - 0.5]);
            }
        }
        prop_assert!((mass / (g * g) as f64 - b.rho_l1).abs() < 1e-6);
    }
}
