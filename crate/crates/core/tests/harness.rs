use lorentz_core::ensemble::{estimate_survival, TailBoundsEstimate, Window};
use lorentz_core::harness::{
    certify_nonconvergence, dominance_check, empirical_fe_observables, make_bump_rho, BumpProfile,
    CertifyOptions, TestFunction,
};
use lorentz_core::kinetic::DecayFit;
use lorentz_core::{Error, LatticeConfig};
use proptest::prelude::*;

fn tail(c_low: f64) -> TailBoundsEstimate {
    TailBoundsEstimate {
        window: Window { lo: 40.0, hi: 400.0 },
        c_low,
        c_high: 1.5 * c_low,
        spread: 1.5,
        n_points: 12,
    }
}

fn decay(c: f64, gamma: f64) -> DecayFit {
    DecayFit {
        c_fit: c,
        gamma_fit: gamma,
        residual: 0.0,
        window: (3.0, 15.0),
    }
}

#[test]
fn unit_density_survival_matches_free_path_statistics() {
    let n = 16u64;
    let cfg = LatticeConfig::boltzmann_grad(2, 1.0, n).unwrap();
    let times = [0.1, 0.3, 0.6, 1.0];
    let table =
        empirical_fe_observables(&|_: &[f64], _: &[f64]| 1.0, &times, &[cfg], &[], 40_000, 5, 8).unwrap();
    let unscaled = LatticeConfig::new(2, cfg.radius()).unwrap();
    let grid: Vec<f64> = times.iter().map(|t| t * n as f64).collect();
    let curve = estimate_survival(&unscaled, 200_000, &grid, grid[3], 77).unwrap();
    for (row, (phi, se)) in table.survival.iter().zip(curve.survival.iter().zip(&curve.std_err)) {
        let combined = (row.std_err.powi(2) + se.powi(2)).sqrt();
        assert!((row.survival - phi).abs() < 3.0 * combined, "t={}: {} vs {phi}", row.t, row.survival);
    }
}

#[test]
fn observables_bound_the_absorbing_side() {
    let cfgs = [
        LatticeConfig::boltzmann_grad(2, 1.0, 8).unwrap(),
        LatticeConfig::boltzmann_grad(2, 1.0, 16).unwrap(),
    ];
    let bump = make_bump_rho(2, BumpProfile::CosineSquared, 2).unwrap();
    let rho = |x: &[f64], _: &[f64]| bump.eval(x);
    let tests = [TestFunction::one(), TestFunction::new("cos", |x, v| 1.0 + 0.5 * (6.0 * x[0]).cos() * v[1])];
    let table = empirical_fe_observables(&rho, &[0.0, 0.2, 0.5], &cfgs, &tests, 5_000, 1, 8).unwrap();
    for row in &table.rows {
        assert!(row.absorbing <= row.specular + 1e-12, "{row:?}");
    }
}

#[test]
fn dominance_on_both_scales() {
    for n in [8u64, 16] {
        let cfg = LatticeConfig::boltzmann_grad(2, 1.0, n).unwrap();
        let bump = make_bump_rho(4, BumpProfile::CosineSquared, 2).unwrap();
        let f = |x: &[f64], v: &[f64]| bump.eval(x) * (1.0 + v[0] * v[0]);
        for t in [0.2, 1.0] {
            let rep = dominance_check(5_000, t, &cfg, &f, n).unwrap();
            assert_eq!(rep.fraction, 1.0);
            assert_eq!(rep.n_survivor_mismatch, 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn feasibility_is_monotone_in_m(
        c1 in 0.01f64..2.0,
        c in 0.1f64..5.0,
        gamma in 0.1f64..3.0,
        r_star in 0.5f64..2.0,
        horizon_factor in 1.5f64..30.0,
    ) {
        let schedule = [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64];
        let opts = CertifyOptions {
            horizon: Some(horizon_factor / r_star),
            scan_points: 500,
            ..CertifyOptions::default()
        };
        match certify_nonconvergence(&tail(c1), &decay(c, gamma), r_star, 2, &schedule, &opts) {
            Ok(rep) => {
                let first = rep.provenance.schedule.iter().position(|e| e.window.is_some());
                for (i, e) in rep.provenance.schedule.iter().enumerate() {
                    prop_assert_eq!(e.window.is_some(), first.is_some_and(|f| i >= f));
                }
                prop_assert_eq!(rep.m, first.map(|f| schedule[f]));
                if let Some(mid) = rep.margin_mid {
                    prop_assert!(mid > 0.0);
                }
            }
            Err(Error::InvariantViolation(msg)) => prop_assert!(false, "{}", msg),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn reports_are_reproducible(c1 in 0.05f64..1.0, gamma in 0.3f64..2.0) {
        let schedule = [4, 16, 64];
        let a = certify_nonconvergence(&tail(c1), &decay(1.0, gamma), 1.0, 2, &schedule, &CertifyOptions::default());
        let b = certify_nonconvergence(&tail(c1), &decay(1.0, gamma), 1.0, 2, &schedule, &CertifyOptions::default());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn jensen_holds_on_every_evaluation(seed in any::<u64>(), n in 2u64..12, bins in 1usize..12) {
        let cfg = LatticeConfig::boltzmann_grad(2, 0.8, n).unwrap();
        let table = empirical_fe_observables(
            &|x: &[f64], _: &[f64]| 1.0 + x[0].abs(), &[0.0, 0.4], &[cfg], &[TestFunction::one()], 300, seed, bins,
        ).unwrap();
        for row in &table.survival {
            prop_assert!(row.jensen_square_mean + 1e-15 >= row.jensen_mean_square);
        }
    }
}
