//! Property tests for invariants that hold over whole
//! parameter regions rather than at frozen points.

use dualrx_core::channel::{asymptotic_signal, EnvParams, Receiver};
use dualrx_core::inference::{
    estimate_de, skellam_pmf, EstimationProblem, ObservationSet, SkellamModel, UnknownParam,
};
use dualrx_core::numerics::{erfcx, find_root, integrate, QuadratureSpec, RootSpec};
use proptest::prelude::*;

fn env_strategy() -> impl Strategy<Value = EnvParams> {
    (
        8.0..40.0f64,   // d1
        8.0..40.0f64,   // d2
        0.5..12.0f64,   // v
        30.0..150.0f64, // diffusion
        0.1..2.5f64,    // k
        200.0..3000.0f64,
        0.2..1.5f64, // delta
        0.0..15.0f64, // xi
    )
        .prop_map(|(d1, d2, v, diffusion, k, mu, delta, xi)| {
            EnvParams::new(d1, d2, v, diffusion, k, mu, delta, xi).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erfcx_positive_and_decreasing(a in -25.0..100.0f64, gap in 1e-6..10.0f64) {
        let lo = erfcx(a).unwrap();
        let hi = erfcx(a + gap).unwrap();
        prop_assert!(lo > 0.0);
        prop_assert!(hi > 0.0);
        prop_assert!(hi < lo, "erfcx must strictly decrease: erfcx({a}) = {lo}, erfcx({}) = {hi}", a + gap);
    }

    #[test]
    fn quadrature_is_additive(split in 0.1..0.9f64, scale in 0.5..4.0f64) {
        let spec = QuadratureSpec::default();
        let f = move |x: f64| (scale * x).sin() + (0.3 * x).cos();
        let (a, b, c) = (0.0, split, 1.0);
        let whole = integrate(f, a, c, &spec).unwrap().value;
        let parts = integrate(f, a, b, &spec).unwrap().value + integrate(f, b, c, &spec).unwrap().value;
        prop_assert!((whole - parts).abs() <= 2.0 * spec.abs_tol.max(1e-12), "{whole} vs {parts}");
    }

    #[test]
    fn root_refind_is_idempotent(root in -5.0..5.0f64) {
        let f = move |x: f64| (x - root) * ((x - root).powi(2) + 1.0);
        let spec = RootSpec::new(root - 3.0, root + 4.0);
        let r1 = find_root(f, &spec).unwrap();
        let spec2 = RootSpec::new(r1 - spec.x_tol, r1 + spec.x_tol);
        let r2 = find_root(f, &spec2).unwrap();
        prop_assert!((r1 - r2).abs() <= spec.x_tol);
    }

    #[test]
    fn asymptote_flow_ordering_and_conservation(env in env_strategy()) {
        let n1 = asymptotic_signal(Receiver::Rx1, &env).unwrap();
        let n2 = asymptotic_signal(Receiver::Rx2, &env).unwrap();
        prop_assert!(n1 > 0.0 && n2 > 0.0);
        prop_assert!(n1 + n2 <= env.mu * env.delta * (1.0 + 1e-12));
        if (env.d1 - env.d2).abs() < 1e-9 {
            prop_assert!(n2 > n1, "downstream receiver must win with symmetric geometry");
        }
        // more flow shifts signal downstream
        let mut faster = env;
        faster.v *= 1.5;
        prop_assert!(asymptotic_signal(Receiver::Rx2, &faster).unwrap() > n2 * (1.0 - 1e-12));
        prop_assert!(asymptotic_signal(Receiver::Rx1, &faster).unwrap() < n1 * (1.0 + 1e-12));
        // degradation and distance shrink the signal
        let mut hotter = env;
        hotter.k *= 1.4;
        prop_assert!(asymptotic_signal(Receiver::Rx2, &hotter).unwrap() < n2);
        prop_assert!(asymptotic_signal(Receiver::Rx1, &hotter).unwrap() < n1);
    }

    #[test]
    fn skellam_pmf_is_a_distribution(n1 in 0.5..60.0f64, n2 in 0.5..60.0f64) {
        let m = SkellamModel::new(n1, n2).unwrap();
        let center = (n2 - n1).round() as i64;
        let half = (12.0 * (n1 + n2).sqrt()).ceil() as i64;
        let mut total = 0.0;
        for n in (center - half)..=(center + half) {
            let p = skellam_pmf(n, &m).unwrap();
            prop_assert!((0.0..1.0).contains(&p));
            total += p;
        }
        prop_assert!((1.0 - 1e-9..=1.0 + 1e-10).contains(&total), "mass {total}");
    }

    #[test]
    fn difference_estimate_ignores_common_noise(shift in 0u64..60, seed in 0u64..500) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::SmallRng::seed_from_u64(seed);
        let env = EnvParams::new(20.0, 20.0, 6.0, 79.4, 0.8, 1000.0, 0.5, 0.0).unwrap();
        let prob = EstimationProblem::for_study(UnknownParam::V, env).unwrap();
        let g1: Vec<u64> = (0..6).map(|_| rng.gen_range(15..45)).collect();
        let g2: Vec<u64> = (0..6).map(|_| rng.gen_range(95..160)).collect();
        let base = ObservationSet::new(g1.clone(), g2.clone()).unwrap();
        let moved = ObservationSet::new(
            g1.iter().map(|&c| c + shift).collect(),
            g2.iter().map(|&c| c + shift).collect(),
        ).unwrap();
        let a = estimate_de(&prob, &base).unwrap();
        let b = estimate_de(&prob, &moved).unwrap();
        prop_assert_eq!(a, b);
    }
}
