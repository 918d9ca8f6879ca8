use proptest::prelude::*;
use reaedp::mechanism_f::{band_index, derived_privacy, exact_output_distribution, mc_dp_audit, FParams, Universe};
use reaedp::privacy::{compose_advanced, compose_sequential, PrivacyParams};

fn instance() -> impl Strategy<Value = (usize, Vec<usize>, FParams, usize)> {
    (2usize..=5, 1usize..=8).prop_flat_map(|(len, n)| {
        (
            Just(len),
            prop::collection::vec(0..len, n),
            1u64..=n as u64,
            1.05f64..5.0,
            0.05f64..2.0,
            0.3f64..3.0,
            0..len,
        )
            .prop_flat_map(|(len, d, k, gamma, eps0, tau, dp)| {
                (1u64..=k).prop_map(move |t| (len, d.clone(), FParams::new(k, t, gamma, eps0).with_tau(tau), dp))
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn audit_holds_on_small_instances((len, d, p, dp) in instance()) {
        let u = Universe::line(len).unwrap();
        let exact = exact_output_distribution(&d, &p, &u).unwrap();
        prop_assert!((exact.accept_mass() + exact.reject - 1.0).abs() < 1e-9);
        prop_assert!(exact.accept.iter().all(|&a| (0.0..=1.0).contains(&a)));
        let rep = mc_dp_audit(&d, dp, &p, &u).unwrap();
        prop_assert!(rep.passed, "{rep:?}");
        prop_assert_eq!(rep.cell_equality_violations + rep.monotonicity_violations, 0);
    }

    #[test]
    fn derived_privacy_grows_with_gamma(k in 2u64..100, t in 1u64..50, g in 1.01f64..10.0, eps0 in 0.01f64..2.0) {
        prop_assume!(t <= k);
        let a = derived_privacy(&FParams::new(k, t, g, eps0)).unwrap();
        let b = derived_privacy(&FParams::new(k, t, g * 1.5, eps0)).unwrap();
        prop_assert!(b.epsilon > a.epsilon);
        prop_assert_eq!(a.delta, b.delta);
    }

    #[test]
    fn bands_are_non_decreasing_as_mass_falls(a in 1e-12f64..1.0, b in 1e-12f64..1.0, g in 1.01f64..20.0) {
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        prop_assert!(band_index(lo, g) >= band_index(hi, g));
    }

    #[test]
    fn advanced_covers_a_single_step(eps0 in 0.001f64..1.0, dp in 1e-9f64..0.1) {
        // advanced composition of one step never reports less than the step itself
        let adv = compose_advanced(1, eps0, 0.0, dp).unwrap();
        let seq = compose_sequential(&[PrivacyParams::new(eps0, 0.0).unwrap()]).unwrap();
        prop_assert!(adv.epsilon >= seq.epsilon);
    }
}
