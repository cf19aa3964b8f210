//! Property tests for the structural invariants: inverse round trips,
//! monotonicity of the scalar curves, moment feasibility, and scale
//! invariance. Grid-based monotonicity checks treat any violation as a hard
//! failure rather than a tolerance miss.

use mbound_core::{
    f_curve, h_poly, omega, omega_sup, t_of_beta, t_zero, tau, Exponents, PowerExtremal,
    ShapePair, StepFunction, DEFAULT_ROOT_TOL,
};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inverse_round_trip(r in 1.05f64..5.0, s in 0.0f64..=1.0) {
        let w = omega(r, s, DEFAULT_ROOT_TOL).unwrap();
        prop_assert!((1.0..=omega_sup(r) + 1e-12).contains(&w));
        let back = h_poly(r, w).unwrap();
        prop_assert!((back - s).abs() < 1e-10);
    }

    #[test]
    fn average_is_proportional_to_the_power_function(
        theta in 0.1f64..5.0,
        eps in 1.02f64..1.9,
        kappa in 0.05f64..=1.0,
    ) {
        let exp = Exponents::new(2.0, 1.5).unwrap();
        let g = PowerExtremal::new(&exp, theta, eps, kappa).unwrap();
        for i in 1..=100 {
            let t = kappa * i as f64 / 100.0;
            let lhs = g.average(t);
            let rhs = eps * g.value(t);
            prop_assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1e-12));
        }
    }

    #[test]
    fn moments_of_random_steps_are_feasible(seed in any::<u64>(), n in 1usize..=12) {
        let exp = Exponents::new(2.0, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kappa = rng.random_range(0.05..1.0);
        let h = StepFunction::random(&mut rng, n, kappa);
        // constructor re-checks every Hölder inequality
        let m = h.moments(&exp).unwrap();
        let shape = m.shape_params(&exp).unwrap();
        prop_assert!(shape.s1() > 0.0 && shape.s1() <= 1.0);
        prop_assert!(shape.s2() > 0.0 && shape.s2() <= 1.0);
    }

    #[test]
    fn shape_is_scale_invariant(seed in any::<u64>(), n in 2usize..=10) {
        let exp = Exponents::new(2.0, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = StepFunction::random(&mut rng, n, 1.0);
        let base = h.moments(&exp).unwrap().shape_params(&exp).unwrap();
        for c in [0.5, 2.0, 10.0] {
            let scaled = h.scaled(c).unwrap().moments(&exp).unwrap().shape_params(&exp).unwrap();
            prop_assert!((scaled.s1() - base.s1()).abs() < 1e-12);
            prop_assert!((scaled.s2() - base.s2()).abs() < 1e-12);
        }
    }
}

#[test]
fn constant_functions_sit_exactly_on_the_moment_boundary() {
    let exp = Exponents::new(2.0, 1.5).unwrap();
    for (c, kappa) in [(1.0, 1.0), (2.5, 0.5), (0.3, 0.8)] {
        let h = StepFunction::constant(kappa, c).unwrap();
        let shape = h.moments(&exp).unwrap().shape_params(&exp).unwrap();
        assert!((shape.s1() - 1.0).abs() < 1e-12);
        assert!((shape.s2() - 1.0).abs() < 1e-12);
        assert!(shape.is_boundary(&exp));
    }
}

#[test]
fn tau_is_strictly_increasing() {
    let exp = Exponents::new(2.0, 1.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let shape = ShapePair::random(&exp, &mut rng);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..100 {
            let t = 1.0 + 2.0 * i as f64 / 99.0;
            let v = tau(&exp, &shape, t).unwrap();
            assert!(v > prev, "tau not increasing at t = {t}");
            prev = v;
        }
    }
}

#[test]
fn case_curve_is_strictly_increasing_up_to_the_zero_order_root() {
    for (p, q) in [(2.0, 1.5), (3.0, 2.0), (1.8, 1.3)] {
        let exp = Exponents::new(p, q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let shape = ShapePair::random(&exp, &mut rng);
            let t0 = t_zero(&exp, &shape, DEFAULT_ROOT_TOL).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for i in 0..100 {
                let t = 1.0 + (t0 - 1.0) * i as f64 / 99.0;
                let v = f_curve(&exp, &shape, t, DEFAULT_ROOT_TOL).unwrap();
                assert!(
                    v > prev,
                    "curve not increasing at t = {t} (shape ({}, {}))",
                    shape.s1(),
                    shape.s2()
                );
                prev = v;
            }
        }
    }
}

#[test]
fn beta_family_roots_satisfy_their_equation() {
    for (p, q) in [(2.0, 1.5), (3.0, 2.0), (1.8, 1.3)] {
        let exp = Exponents::new(p, q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let shape = ShapePair::random(&exp, &mut rng);
            for i in 1..=8 {
                let beta = (1.0 / (p - 1.0)) * i as f64 / 8.0;
                let t = t_of_beta(&exp, &shape, beta, DEFAULT_ROOT_TOL).unwrap();
                // residual of the defining equation, written through the
                // decreasing map
                let g = q * (p - 1.0) * (beta + 1.0) - p * (q - 1.0);
                let a = g / (p * (beta + 1.0).powf(q));
                let w = omega(q, shape.s2(), DEFAULT_ROOT_TOL).unwrap();
                let source = (p - q) / g * (beta + 1.0) * shape.s1()
                    + shape.s1() / shape.s2()
                        * (p * (q - 1.0) * beta / g * w.powf(q)
                            - p * (beta + 1.0).powf(q) / g);
                let residual = t.powf(p - q) - a * t.powf(p) + a * source;
                assert!(
                    residual.abs() < 10.0 * DEFAULT_ROOT_TOL,
                    "residual {residual:e} at beta = {beta}"
                );
            }
        }
    }
}
