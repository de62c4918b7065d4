//! Property tests over randomized scenarios: algebraic identities of the
//! reduced coefficients, oracle equivalences, monotonicity statements, and
//! structural facts about the next-generation matrix.

mod common;

use commuter_sir::{
    approx_coefficients, approx_threshold, build_next_generation, classify_monotonicity,
    increase_condition_a, minimize_threshold, ode_rhs, reduced_coefficients, sign_indicators_ab,
    spectral_radius, threshold_explicit, threshold_via_alpha, EpidemicParams, MobilityParams,
    PopulationSplit, Scenario, StateVector, GROUP_COUNT,
};
use common::scale_of;
use proptest::prelude::*;

fn rate() -> impl Strategy<Value = f64> {
    ((1e-2f64).ln()..=(1e2f64).ln()).prop_map(f64::exp)
}

fn gamma() -> impl Strategy<Value = f64> {
    0.05f64..=1.0
}

/// Populations bounded away from zero so every group is nonempty.
fn population() -> impl Strategy<Value = f64> {
    0.1f64..1000.0
}

prop_compose! {
    fn scenario()(
        beta1 in rate(), beta2 in rate(), g in gamma(),
        l1 in rate(), m1 in rate(), l2 in rate(), m2 in rate(),
        n1r in population(), n1c in population(),
        n2r in population(), n2c in population(),
    ) -> Scenario {
        Scenario::new(
            EpidemicParams::new(beta1, beta2, g).unwrap(),
            MobilityParams::new(l1, m1, l2, m2).unwrap(),
            PopulationSplit::new(n1r, n1c, n2r, n2c).unwrap(),
        )
        .unwrap()
    }
}

prop_compose! {
    /// Scenario with the betas ordered so that R2 > R1 holds by construction.
    fn ordered_scenario()(
        ba in rate(), bb in rate(), g in gamma(),
        l1 in rate(), m1 in rate(), l2 in rate(), m2 in rate(),
        n1r in population(), n1c in population(),
        n2r in population(), n2c in population(),
    ) -> Scenario {
        let (lo, hi) = if ba < bb { (ba, bb) } else { (bb, ba) };
        Scenario::new(
            EpidemicParams::new(lo, hi.max(lo * (1.0 + 1e-9)), g).unwrap(),
            MobilityParams::new(l1, m1, l2, m2).unwrap(),
            PopulationSplit::new(n1r, n1c, n2r, n2c).unwrap(),
        )
        .unwrap()
    }
}

proptest! {
    #[test]
    fn explicit_formula_matches_power_iteration(sc in scenario()) {
        let explicit = threshold_explicit(&reduced_coefficients(&sc));
        let m = build_next_generation(&sc).unwrap();
        let rho = spectral_radius(&m.m, 1e-12).unwrap();
        prop_assert!((explicit - rho).abs() <= 1e-9 * scale_of(explicit));
    }

    #[test]
    fn threshold_sandwiched_by_intrinsic_numbers(sc in scenario()) {
        let (r1, r2) = sc.epidemic().intrinsic_reproduction();
        let r12 = threshold_explicit(&reduced_coefficients(&sc));
        let tol = 1e-12 * scale_of(r1.max(r2));
        prop_assert!(r12 >= r1.min(r2) - tol && r12 <= r1.max(r2) + tol);
    }

    #[test]
    fn equal_betas_collapse_to_common_r(
        beta in rate(), g in gamma(),
        l1 in rate(), m1 in rate(), l2 in rate(), m2 in rate(),
        n1r in population(), n1c in population(),
        n2r in population(), n2c in population(),
    ) {
        let sc = Scenario::new(
            EpidemicParams::new(beta, beta, g).unwrap(),
            MobilityParams::new(l1, m1, l2, m2).unwrap(),
            PopulationSplit::new(n1r, n1c, n2r, n2c).unwrap(),
        )
        .unwrap();
        let r = beta / g;
        let r12 = threshold_explicit(&reduced_coefficients(&sc));
        prop_assert!((r12 - r).abs() <= 1e-12 * scale_of(r));
    }

    #[test]
    fn reduced_rows_sum_to_intrinsic_numbers(sc in scenario()) {
        let (r1, r2) = sc.epidemic().intrinsic_reproduction();
        let q = reduced_coefficients(&sc);
        prop_assert!((q.q11 + q.q21 - r1).abs() <= 1e-12 * scale_of(r1));
        prop_assert!((q.q22 + q.q12 - r2).abs() <= 1e-12 * scale_of(r2));
        prop_assert!(q.q11 >= 0.0 && q.q12 >= 0.0 && q.q21 >= 0.0 && q.q22 >= 0.0);
    }

    #[test]
    fn alpha_route_agrees_when_ordered(sc in scenario()) {
        let (r1, r2) = sc.epidemic().intrinsic_reproduction();
        prop_assume!(r2 > r1);
        let q = reduced_coefficients(&sc);
        let explicit = threshold_explicit(&q);
        let (via, alpha) = threshold_via_alpha(&q, r1, r2).unwrap();
        prop_assert!((via - explicit).abs() <= 1e-12 * scale_of(explicit));
        prop_assert!((0.0..1.0).contains(&alpha));
    }

    #[test]
    fn next_generation_matrix_has_rank_two(sc in scenario()) {
        let m = build_next_generation(&sc).unwrap().m;
        let dm = nalgebra::DMatrix::from_fn(GROUP_COUNT, GROUP_COUNT, |r, c| m.0[r][c]);
        let sv = dm.svd(false, false).singular_values;
        prop_assert!(sv[2] <= 1e-10 * sv[0], "sigma3/sigma1 = {}", sv[2] / sv[0]);
    }

    #[test]
    fn zero_compartments_are_not_pushed_negative(
        sc in scenario(),
        raw in proptest::array::uniform18(0.0f64..100.0),
        zero_mask in proptest::array::uniform18(proptest::bool::weighted(0.3)),
    ) {
        let mut flat = raw;
        for (v, &z) in flat.iter_mut().zip(zero_mask.iter()) {
            if z {
                *v = 0.0;
            }
        }
        let state = StateVector::from_flat(&flat);
        let d = ode_rhs(&sc, &state);
        let dflat = d.to_flat();
        for (k, (&v, &dv)) in flat.iter().zip(dflat.iter()).enumerate() {
            if v == 0.0 {
                prop_assert!(dv >= 0.0, "component {k} at zero has derivative {dv}");
            }
        }
    }

    #[test]
    fn home_totals_have_zero_derivative(
        sc in scenario(),
        raw in proptest::array::uniform18(0.0f64..100.0),
    ) {
        let d = ode_rhs(&sc, &StateVector::from_flat(&raw));
        let t = d.group_totals();
        let scale: f64 = raw.iter().sum::<f64>() + 1.0;
        prop_assert!(t[0].abs() <= 1e-12 * scale);
        prop_assert!(t[3].abs() <= 1e-12 * scale);
        prop_assert!((t[1] + t[2]).abs() <= 1e-10 * scale);
        prop_assert!((t[4] + t[5]).abs() <= 1e-10 * scale);
    }

    #[test]
    fn approx_threshold_decreases_in_n2c(sc in ordered_scenario(), u1 in 0.0f64..1.0, u2 in 0.0f64..1.0) {
        let n2 = sc.population().n2();
        let h = 1e-4 * n2;
        let n1c = u1 * sc.population().n1();
        let n2c = u2 * (n2 - h);
        let f = |x: f64| approx_threshold(&sc.with_commuters(n1c, x).unwrap()).unwrap().0;
        prop_assert!(f(n2c + h) - f(n2c) <= 1e-10);
    }

    #[test]
    fn condition_a_forces_growth_in_n1c(sc in ordered_scenario(), u1 in 0.0f64..1.0, u2 in 0.0f64..1.0) {
        let n1 = sc.population().n1();
        let h = 1e-4 * n1;
        let n1c = u1 * (n1 - h);
        let n2c = u2 * sc.population().n2();
        let probe = sc.with_commuters(n1c, n2c).unwrap();
        if increase_condition_a(&probe) {
            let f = |x: f64| approx_threshold(&sc.with_commuters(x, n2c).unwrap()).unwrap().0;
            prop_assert!(f(n1c + h) - f(n1c) >= -1e-10);
        }
    }

    #[test]
    fn sign_indicators_force_monotonicity(
        sc in ordered_scenario(),
        u1 in 0.0f64..1.0,
        u2 in 0.0f64..1.0,
    ) {
        let n1 = sc.population().n1();
        let h = 1e-4 * n1;
        let n1c = u1 * (n1 - h);
        let n2c = u2 * sc.population().n2();
        let probe = sc.with_commuters(n1c, n2c).unwrap();
        let (a, b) = sign_indicators_ab(&probe).unwrap();
        let f = |x: f64| approx_threshold(&sc.with_commuters(x, n2c).unwrap()).unwrap().0;
        let diff = f(n1c + h) - f(n1c);
        if a < 0.0 && b < 0.0 {
            prop_assert!(diff >= -1e-10, "A,B < 0 but diff = {diff:e}");
        } else if a > 0.0 && b > 0.0 {
            prop_assert!(diff <= 1e-10, "A,B > 0 but diff = {diff:e}");
        }
    }

    #[test]
    fn classification_always_lands_in_the_trichotomy(sc in ordered_scenario(), u in 0.01f64..0.99) {
        let n2c = u * sc.population().n2();
        let class = classify_monotonicity(&sc, n2c);
        prop_assert!(class.is_ok(), "consistency error: {class:?}");
    }

    #[test]
    fn approx_coefficients_match_gamma_zero_closed_form(sc in scenario()) {
        // Independent route: reduced coefficients with the residence-time
        // factors taken at gamma = 0.
        let q = approx_coefficients(&sc).unwrap();
        let mo = sc.mobility();
        let eq = sc.equilibrium();
        let (r1, r2) = sc.epidemic().intrinsic_reproduction();
        let d1 = mo.lambda1() + mo.mu1();
        let d2 = mo.lambda2() + mo.mu2();
        let q21 = r1 * (eq.n11() * mo.lambda1() / d1 + eq.n21() * mo.mu2() / d2) / eq.n1p();
        let q12 = r2 * (eq.n12() * mo.mu1() / d1 + eq.n22() * mo.lambda2() / d2) / eq.n2p();
        prop_assert!((q.tq21 - q21).abs() <= 1e-12 * scale_of(q21));
        prop_assert!((q.tq12 - q12).abs() <= 1e-12 * scale_of(q12));
    }
}

/// The minimizer driven by the approximation lands within one grid cell of
/// the exact threshold's brute-force argmin for the three bundled cases.
#[test]
fn approx_minimizer_matches_exact_grid_argmin() {
    for (l2, m2) in [(10.0, 1.0), (10.0, 100.0), (10.0, 70.0)] {
        let (l1, m1) = if m2 == 100.0 { (10.0, 100.0) } else { (10.0, 10.0) };
        let sc = Scenario::new(
            EpidemicParams::new(0.27, 0.33, 0.3).unwrap(),
            MobilityParams::new(l1, m1, l2, m2).unwrap(),
            PopulationSplit::from_proportions(1.0, 1.0, 0.5, 0.5).unwrap(),
        )
        .unwrap();
        let min = minimize_threshold(&sc).unwrap();
        let cells = 200;
        let cell = 1.0 / cells as f64;
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=cells {
            let n1c = k as f64 * cell;
            let exact =
                threshold_explicit(&reduced_coefficients(&sc.with_commuters(n1c, 1.0).unwrap()));
            if exact < best.0 {
                best = (exact, n1c);
            }
        }
        assert!(
            (min.n1c_star - best.1).abs() <= cell + 1e-12,
            "approx minimizer {} vs exact grid argmin {} (mu2 = {m2})",
            min.n1c_star,
            best.1
        );
    }
}
