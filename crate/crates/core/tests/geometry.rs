use hsq_core::geometry::{ball_inclusions_check, ball_measure, dilate, hom_norm, random_unit_vector, shard_rng, HomNorm};
use hsq_core::quadrature::integrate_monte_carlo;
use proptest::prelude::*;

fn closed_form(x: &[f64]) -> f64 {
    ((x[0].powi(4) + 4.0 * x[1] * x[1]).sqrt() + x[0] * x[0]).sqrt() / 2f64.sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn grushin_norm_matches_closed_form(x1 in -50.0f64..50.0, x2 in -50.0f64..50.0) {
        let x = [x1, x2];
        prop_assert!((hom_norm(&[1, 2], &x) - closed_form(&x)).abs() < 1e-10 * (1.0 + closed_form(&x)));
    }

    #[test]
    fn norm_is_homogeneous(seed in any::<u64>(), log_lambda in -3.0f64..3.0, k in 0usize..3) {
        let sigmas: [&[u32]; 3] = [&[1, 2], &[1, 1, 2, 3], &[1, 3]];
        let sigma = sigmas[k];
        let omega = random_unit_vector(&mut shard_rng(seed, 0), sigma.len());
        let lambda = 10f64.powf(log_lambda);
        let n = hom_norm(sigma, &omega);
        prop_assert!((n - 1.0).abs() < 1e-12);
        let scaled = hom_norm(sigma, &dilate(sigma, &omega, lambda));
        prop_assert!((scaled - lambda).abs() <= 1e-9 * lambda);
    }

    #[test]
    fn normalised_point_has_unit_norm(x in prop::collection::vec(-20.0f64..20.0, 3)) {
        let sigma = [1, 2, 3];
        let r = hom_norm(&sigma, &x);
        prop_assume!(r > 1e-6);
        prop_assert!((hom_norm(&sigma, &dilate(&sigma, &x, 1.0 / r)) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn ball_measure_values() {
    let m = ball_measure::<f64>(&[1, 2], 2.0).unwrap();
    assert!((m - 8.0 * std::f64::consts::PI).abs() < 1e-12);
    for (sigma, r) in [(vec![1, 2], 1.5), (vec![1, 1, 2], 1.0)] {
        let (mean, se) = integrate_monte_carlo(&sigma, r, 1_000_000, 11, 1, |_x: &[f64]| Ok(vec![1.0])).unwrap();
        let exact = ball_measure::<f64>(&sigma, r).unwrap();
        assert!((mean[0] - exact).abs() <= 3.0 * se[0], "{sigma:?}: {} ± {} vs {exact}", mean[0], se[0]);
    }
}

#[test]
fn homogeneous_dimension() {
    assert_eq!(HomNorm::new(vec![1, 1, 2]).unwrap().homogeneous_dim(), 4);
    assert!(HomNorm::new(vec![1, 0]).is_err());
}

#[test]
fn grushin_lift_ball_inclusions() {
    let r = ball_inclusions_check(1.0, &[1, 2], &[1], 20_000, 3).unwrap();
    assert_eq!(r.outer_violations, 0);
    assert_eq!(r.inner_violations, 0);
    assert!(r.outer_tested > 0 && r.inner_tested > 0);
}
