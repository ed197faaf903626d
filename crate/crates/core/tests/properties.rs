//! Property tests for the invariants of each module.

mod common;

use common::{brute_force_dstar, sorted_formula_1d};
use discbound::bounds::{
    bound_general, bound_gnewuch, bound_pw, g_argmax, k0, layer_factor_argmax, layer_factor_argmax_scan, u_of_k,
};
use discbound::cover::{
    build_cover_2d, cover_to_delta_cover, layer_brackets_2d, layer_count_2d, layers_2d, validate_cover, WEIGHT_TOL,
};
use discbound::discrepancy::{star_disc_exact, star_disc_upper_cover, PointSet};
use discbound::exactmath::{bernoulli, faulhaber_closed, gfi_rhs, power_sum, rat};
use discbound::probbounds::{
    disc_coefficient_for_probability, disc_probability_bound, expected_disc_bound, weighted_probability_bound,
    weighted_theta_coeff, ALPHA, BETA,
};
use discbound::sampling::{is_latin, lhs_sample, mc_sample, shuffle_exchangeable, SamplerKind, SamplerSpec};
use num_traits::Zero;
use proptest::prelude::*;

fn point_set(max_d: usize, max_n: usize) -> impl Strategy<Value = PointSet> {
    (1..=max_d, 1..=max_n).prop_flat_map(|(d, n)| {
        proptest::collection::vec(0.0f64..1.0, d * n).prop_map(move |c| PointSet::new(d, c).unwrap())
    })
}

// Coordinates on a coarse grid so ties between points are common.
fn tied_point_set() -> impl Strategy<Value = PointSet> {
    (1..=3usize, 1..=10usize).prop_flat_map(|(d, n)| {
        proptest::collection::vec(0u32..5, d * n)
            .prop_map(move |c| PointSet::new(d, c.into_iter().map(|k| k as f64 / 5.0).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifted_power_sum_below_rhs(n in 1u64..60, j in 1u32..25, p in 0i64..=16) {
        let r = rat(p, 16);
        prop_assert!(power_sum(n, j, &r) <= gfi_rhs(n, j, &r));
    }

    #[test]
    fn closed_form_matches_direct_sum(n in 1u64..40, j in 1u32..18) {
        prop_assert_eq!(faulhaber_closed(n, j), power_sum(n, j, &rat(0, 1)));
    }

    #[test]
    fn odd_bernoulli_vanish(k in 1usize..30) {
        prop_assert!(bernoulli(2 * k + 1).is_zero());
    }

    #[test]
    fn bound_ordering(d in 2u32..150, delta in 0.001f64..0.99) {
        let g = bound_general(d, delta).unwrap();
        let p = bound_pw(d, delta).unwrap();
        let n = bound_gnewuch(d, delta).unwrap();
        prop_assert!(g.ln_value <= p.ln_value && p.ln_value <= n.ln_value);
        prop_assert!(g.value >= 1.0);
        if d >= 3 {
            prop_assert!(g.ln_value < p.ln_value);
        }
    }

    #[test]
    fn layer_factor_argmax_formulas(d in 2u32..800) {
        prop_assert_eq!(layer_factor_argmax_scan(d), layer_factor_argmax(d));
        prop_assert!(g_argmax(d) <= k0(d));
    }

    #[test]
    fn u_does_not_depend_on_d(k in 1u32..200, extra in 1u32..10_000) {
        let a = u_of_k(k, k + 1).unwrap();
        let b = u_of_k(k, k + extra).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn planar_cover_is_valid(delta in 0.02f64..0.95) {
        let (cover, _) = build_cover_2d(delta).unwrap();
        let report = validate_cover(&cover, 2000, 1);
        prop_assert!(report.passed(), "{:?}", report);
        prop_assert!((cover.len() as f64) <= discbound::bounds::bound_d2(delta).unwrap());
        for layer in layers_2d(delta).unwrap() {
            if layer.a_q > 0.0 {
                let count = layer_brackets_2d(&layer, delta).len() as u64;
                prop_assert!(count <= layer_count_2d(layer.delta_q).unwrap());
            }
        }
        prop_assert!(cover.brackets.iter().all(|b| b.weight() <= delta + WEIGHT_TOL));
    }

    #[test]
    fn exact_matches_brute_force(points in point_set(3, 10)) {
        let fast = star_disc_exact(&points).unwrap().value;
        prop_assert!((fast - brute_force_dstar(&points)).abs() <= 1e-15);
        prop_assert!((0.0..=1.0).contains(&fast));
    }

    #[test]
    fn exact_matches_brute_force_with_ties(points in tied_point_set()) {
        let fast = star_disc_exact(&points).unwrap().value;
        prop_assert!((fast - brute_force_dstar(&points)).abs() <= 1e-15);
    }

    #[test]
    fn exact_matches_sorted_formula(xs in proptest::collection::vec(0.0f64..1.0, 1..60)) {
        let points = PointSet::new(1, xs.clone()).unwrap();
        prop_assert!((star_disc_exact(&points).unwrap().value - sorted_formula_1d(&xs)).abs() <= 1e-15);
    }

    #[test]
    fn exact_is_order_and_axis_invariant(points in point_set(3, 12), seed in any::<u64>()) {
        let base = star_disc_exact(&points).unwrap().value;
        let shuffled = shuffle_exchangeable(&points, seed);
        prop_assert_eq!(star_disc_exact(&shuffled).unwrap().value, base);
        let d = points.dim();
        // reverse the coordinate order
        let flipped: Vec<f64> = points.iter().flat_map(|p| p.iter().rev().copied()).collect();
        let flipped = PointSet::new(d, flipped).unwrap();
        prop_assert!((star_disc_exact(&flipped).unwrap().value - base).abs() <= 1e-15);
    }

    #[test]
    fn cover_bound_sandwiches_exact(points in point_set(2, 16), idx in 0usize..2) {
        let delta = [0.2, 0.1][idx];
        let cover = cover_to_delta_cover(&discbound::cover::build_cover_nd(points.dim(), delta).unwrap());
        let exact = star_disc_exact(&points).unwrap().value;
        let est = star_disc_upper_cover(&points, &cover).unwrap();
        prop_assert!(est.lower.value <= exact + 1e-15);
        prop_assert!(exact <= est.upper.value + 1e-15);
        prop_assert!(est.upper.value <= exact + delta + 1e-12);
    }

    #[test]
    fn samplers_are_valid(d in 1usize..6, n in 1usize..200, seed in any::<u64>()) {
        let lhs = lhs_sample(&SamplerSpec::new(SamplerKind::Lhs, d, n, seed).unwrap());
        prop_assert!(is_latin(&lhs));
        let mc = mc_sample(&SamplerSpec::new(SamplerKind::Mc, d, n, seed).unwrap());
        prop_assert!(mc.coords().iter().all(|x| (0.0..1.0).contains(x)));
        prop_assert_eq!(mc.len(), n);
    }

    #[test]
    fn probabilities_in_unit_interval(c in 0.01f64..10.0, d in 1u32..100, rho in 0.0f64..5.0) {
        let p = disc_probability_bound(c, d, rho);
        prop_assert!((0.0..=1.0).contains(&p));
        let w = weighted_probability_bound(c, d, rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&w));
    }

    #[test]
    fn inverse_formulas_round_trip(q in 0.01f64..0.999, d in 2u32..60, rho in 0.0f64..3.0) {
        let c = disc_coefficient_for_probability(q, d, rho).unwrap();
        prop_assert!(disc_probability_bound(c * (1.0 + 1e-9), d, rho) >= q);
        let c = weighted_theta_coeff(q, d, rho).unwrap();
        prop_assert!(weighted_probability_bound(c * (1.0 + 1e-9), d, rho).unwrap() >= q);
    }

    #[test]
    fn tight_expectation_below_simple(d in 1u32..400, n in 1u64..10_000_000) {
        let b = expected_disc_bound(d, n, ALPHA, BETA).unwrap();
        prop_assert!(b.tight <= b.simple);
        prop_assert!(b.tight >= (BETA / ALPHA).sqrt());
    }
}
