mod common;

use common::{brute_force_first_hit, OracleSampler};
use lorentz_core::billiard::{
    absorbing_transport, evolve_billiard, evolve_specular, first_hit, reflect, survival_indicator,
    BoundaryLaw, DiffuseSampling,
};
use lorentz_core::real::TwoFloat;
use lorentz_core::rng::substream;
use lorentz_core::{LatticeConfig, PhasePoint};
use proptest::prelude::*;

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / n).collect()
}

fn direction(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d)
        .prop_filter("nonzero", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-4)
        .prop_map(unit)
}

/// Free point of the fundamental cell, velocity and radius.
fn ray(d: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (prop::collection::vec(-0.5f64..0.5, d), direction(d), 0.01f64..0.45)
        .prop_filter("outside the ball", |(x, _, r)| {
            x.iter().map(|c| c * c).sum::<f64>().sqrt() > r + 1e-9
        })
}

#[test]
fn first_hit_matches_sphere_enumeration() {
    let mut s = OracleSampler::new(11);
    for d in [2usize, 3] {
        for r in [0.05, 0.2] {
            let cfg = LatticeConfig::new(d, r).unwrap();
            let t_max = if d == 2 { 100.0 } else { 300.0 };
            let mut hits = 0;
            for _ in 0..1_000 {
                let x = s.free_point(d, r);
                let v = s.direction(d);
                let got = first_hit(&x, &v, &cfg, t_max).unwrap().tau;
                let want = brute_force_first_hit(&x, &v, r, t_max);
                match (got, want) {
                    (Some(a), Some(b)) => {
                        hits += 1;
                        assert!((a - b).abs() <= 1e-12 * (1.0 + b), "D={d} r={r}: {a} vs {b}");
                    }
                    (None, None) => {}
                    other => panic!("D={d} r={r} x={x:?} v={v:?}: {other:?}"),
                }
            }
            assert!(hits > 500, "D={d} r={r}: only {hits} hits");
        }
    }
}

#[test]
fn double_double_reversal_recovers_the_start() {
    let cfg = LatticeConfig::new(2, 0.15).unwrap();
    let mut s = OracleSampler::new(5);
    let t = TwoFloat::from(25.0);
    let mut checked = 0;
    for _ in 0..100 {
        let p0 = PhasePoint::new(s.free_point(2, 0.15), s.direction(2));
        let p: PhasePoint<TwoFloat> = PhasePoint::from_f64(&p0);
        let fwd = evolve_specular(&p, t, &cfg, 10_000).unwrap();
        let grazing = fwd.events.iter().any(|e| {
            let vn: f64 = e.velocity_in.iter().zip(&e.inward_normal).map(|(a, b)| f64::from(*a * *b)).sum();
            vn.abs() <= 1e-6
        });
        if grazing {
            continue;
        }
        let back = evolve_specular(&fwd.state.reversed(), t, &cfg, 10_000).unwrap();
        let end = back.state.reversed().to_f64();
        let shift: Vec<i64> = fwd.lattice_shift.iter().zip(&back.lattice_shift).map(|(a, b)| a + b).collect();
        assert_eq!(shift, vec![0, 0]);
        for i in 0..2 {
            assert!((end.position[i] - p0.position[i]).abs() < 1e-8, "{p0:?} -> {end:?}");
            assert!((end.velocity[i] - p0.velocity[i]).abs() < 1e-8);
        }
        assert_eq!(back.events.len(), fwd.events.len());
        checked += 1;
    }
    assert!(checked > 90);
}

#[test]
fn absorbing_transport_agrees_with_first_hit() {
    let cfg = LatticeConfig::new(3, 0.2).unwrap();
    let mut s = OracleSampler::new(8);
    for _ in 0..2_000 {
        let p = PhasePoint::new(s.free_point(3, 0.2), s.direction(3));
        let t = 10.0 * s.uniform();
        let (alive, moved) = absorbing_transport(&p, t, &cfg).unwrap();
        let tau = first_hit(&p.position, &p.velocity, &cfg, t).unwrap().tau;
        assert_eq!(alive, tau.is_none());
        assert_eq!(moved.velocity, p.velocity);
        for i in 0..3 {
            let free = p.position[i] + t * p.velocity[i];
            let diff = moved.position[i] - free;
            assert!((diff - diff.round()).abs() < 1e-12);
        }
    }
}

#[test]
fn absorbed_rays_collide_under_the_specular_flow() {
    let cfg = LatticeConfig::boltzmann_grad(2, 1.0, 16).unwrap();
    let mut s = OracleSampler::new(21);
    let mut absorbed = 0;
    for _ in 0..2_000 {
        let y = s.free_point(2, cfg.radius());
        let x: Vec<f64> = y.iter().map(|c| c / 16.0).collect();
        let v = s.direction(2);
        let t = s.uniform();
        if survival_indicator(t, &x, &v, &cfg).unwrap() == 0 {
            absorbed += 1;
            let back = PhasePoint::new(y.clone(), v.iter().map(|c| -c).collect());
            let traj = evolve_specular(&back, 16.0 * t, &cfg, 100_000).unwrap();
            assert!(!traj.events.is_empty());
        }
    }
    assert!(absorbed > 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn translation_is_exact((x, v, r) in ray(3), k in prop::collection::vec(-50i64..50, 3)) {
        let cfg = LatticeConfig::new(3, r).unwrap();
        let shifted: Vec<f64> = x.iter().zip(&k).map(|(a, b)| a + *b as f64).collect();
        let base = first_hit(&x, &v, &cfg, 200.0).unwrap();
        let moved = first_hit(&shifted, &v, &cfg, 200.0).unwrap();
        let reduced: Vec<f64> = shifted.iter().zip(&k).map(|(a, b)| a - *b as f64).collect();
        if reduced == x {
            prop_assert_eq!(base.tau, moved.tau);
        } else {
            prop_assert_eq!(base.tau.is_some(), moved.tau.is_some());
            if let (Some(a), Some(b)) = (base.tau, moved.tau) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
            }
        }
    }

    #[test]
    fn reflection_law_holds((x, v, r) in ray(2)) {
        let cfg = LatticeConfig::new(2, r).unwrap();
        let res = first_hit(&x, &v, &cfg, 1e4).unwrap();
        if let Some(e) = res.event {
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
            let n = &e.inward_normal;
            prop_assert!((dot(n, n) - 1.0).abs() < 1e-12);
            prop_assert!((dot(&e.velocity_out, n) + dot(&e.velocity_in, n)).abs() < 1e-12);
            let tangential = |u: &[f64]| -> Vec<f64> {
                let s = dot(u, n);
                u.iter().zip(n).map(|(a, b)| a - s * b).collect()
            };
            for (a, b) in tangential(&e.velocity_in).iter().zip(tangential(&e.velocity_out)) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            prop_assert_eq!(reflect(&e.velocity_in, n), e.velocity_out);
            let off: Vec<f64> = e.hit_point.iter().zip(&e.obstacle_center).map(|(p, c)| p - *c as f64).collect();
            prop_assert!((dot(&off, &off).sqrt() - r).abs() < 1e-12);
        }
    }

    #[test]
    fn speed_is_preserved((x, v, r) in ray(2), t in 0.0f64..200.0, diffuse in any::<bool>(), seed in any::<u64>()) {
        let cfg = LatticeConfig::new(2, r).unwrap();
        let law = if diffuse { BoundaryLaw::Diffuse(DiffuseSampling::Cosine) } else { BoundaryLaw::Specular };
        let p = PhasePoint::new(x, v);
        let traj = evolve_billiard(&p, t, &cfg, law, &mut substream(seed, 0), 100_000).unwrap();
        let speed = traj.state.velocity.iter().map(|c| c * c).sum::<f64>().sqrt();
        let tol = (1e-12 * (1 + traj.events.len()) as f64).clamp(1e-12, 1e-9);
        prop_assert!((speed - 1.0).abs() <= tol, "{} after {} events", speed, traj.events.len());
        prop_assert!(lorentz_core::lattice::distance_to_lattice(&traj.state.position) >= r - 1e-12);
        prop_assert!(traj.events.windows(2).all(|w| w[0].time <= w[1].time));
    }
}
