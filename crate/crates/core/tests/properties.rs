//! Property-based invariants.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use ovalbound::analytic;
use ovalbound::bounds;
use ovalbound::cli::report::csv_string;
use ovalbound::curve::FourierCurve;
use ovalbound::projection;
use ovalbound::variation;
use proptest::prelude::*;

/// Coefficients for indices 2..=6 small enough that `(φ⁻¹)' ≥ 1/2`.
fn convex_curve() -> impl Strategy<Value = FourierCurve> {
    let amp = |n: usize| -0.5 / (10.0 * n as f64)..0.5 / (10.0 * n as f64);
    (
        (amp(2), amp(3), amp(4), amp(5), amp(6)),
        (amp(2), amp(3), amp(4), amp(5), amp(6)),
    )
        .prop_map(|(a, b)| {
            let a = [(2, a.0), (3, a.1), (4, a.2), (5, a.3), (6, a.4)];
            let b = [(2, b.0), (3, b.1), (4, b.2), (5, b.3), (6, b.4)];
            FourierCurve::from_coefficients(&a, &b).unwrap()
        })
}

fn delta() -> impl Strategy<Value = f64> {
    bounds::DELTA_MARGIN..FRAC_PI_2
}

fn taus() -> impl Strategy<Value = (f64, f64)> {
    (0.01..1.0f64, 0.05..0.5f64).prop_filter_map("τ₂ < π/2", |(t1, gap)| {
        let t2 = t1 + gap;
        (t2 < FRAC_PI_2 - 0.01).then_some((t1, t2))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn g_is_increasing_and_bounded(d1 in delta(), d2 in delta()) {
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let (g1, g2) = (bounds::g(lo).unwrap(), bounds::g(hi).unwrap());
        prop_assert!(g1 <= g2);
        prop_assert!(g1 > 0.0 && g2 <= bounds::g(FRAC_PI_2).unwrap());
    }

    #[test]
    fn b1_is_a_probability_like_weight(nu in 0.0..=1.0f64, d in delta()) {
        let b1 = bounds::b1(nu, d).unwrap();
        prop_assert!(b1 > 0.0 && b1 <= 1.0);
        prop_assert_eq!(bounds::b1(0.0, d).unwrap(), 1.0);
    }

    #[test]
    fn b2_groupings_agree(nu in 0.0..=1.0f64, d in delta()) {
        let (x, y) = (bounds::b2(nu, d).unwrap(), bounds::b2_grouped(nu, d).unwrap());
        prop_assert!((x - y).abs() < 1e-13);
    }

    #[test]
    fn surfaces_stay_above_infmax(nu in 0.0..=1.0f64, d in delta()) {
        prop_assert!(bounds::surface_point(nu, d).bmax >= 0.8245);
    }

    #[test]
    fn out_of_domain_is_refused(nu in 1.0001..10.0f64, d in 1.6..4.0f64) {
        prop_assert!(bounds::b1(nu, 1.0).is_err());
        prop_assert!(bounds::b2(0.5, d).is_err());
        prop_assert!(bounds::g(-d).is_err());
    }

    #[test]
    fn level_set_hits_target(t in 0.0..1.0f64) {
        let d_min = analytic::compute_delta_min();
        let d = d_min + t * (FRAC_PI_2 - 1e-9 - d_min);
        let nu = analytic::level_set_nu(d).unwrap();
        prop_assert!((0.0..=1.0).contains(&nu));
        prop_assert!((bounds::b1(nu, d).unwrap() - analytic::TARGET).abs() < 1e-12);
        prop_assert!(analytic::b2_on_l(d).unwrap() > analytic::TARGET);
        prop_assert!(analytic::minorant(d) > analytic::TARGET);
    }

    #[test]
    fn three_angle_weights_reconstruct_n(a in 0.0..TAU, da in 0.2..2.9f64, db in 0.2..2.9f64) {
        let (b, c) = (a + da, a + da + db);
        prop_assume!((c - a).sin().abs() > 0.1);
        let w = projection::three_angle_weights(a, b, c).unwrap();
        let r = w.reconstruct();
        for (x, n) in r.iter().zip(projection::N) {
            prop_assert!((x - n).abs() < 1e-10);
        }
    }

    #[test]
    fn decomposition_splits_parity(c in convex_curve(), t in 0.0..TAU) {
        prop_assert!(c.validate(0.4).is_ok());
        let p = c.decompose();
        prop_assert!((p.f(t) + p.f(t + PI)).abs() < 1e-12);
        prop_assert!((p.g(t) - p.g(t + PI)).abs() < 1e-12);
        let whole = c.phi_inverse(t) - t - c.c_offset();
        prop_assert!((p.f(t) + p.g(t) - whole).abs() < 1e-12);
        prop_assert!(p.total_variation() <= TAU + 1e-9);
    }

    #[test]
    fn curve_json_round_trips(c in convex_curve()) {
        let back = FourierCurve::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn inversion_is_consistent(c in convex_curve(), s in 0.0..TAU) {
        let phi = c.phi_at(s).unwrap();
        prop_assert!((c.phi_inverse(phi) - s).abs() < 1e-11);
    }

    #[test]
    fn balance_is_positive_and_minimal_at_midpoint(
        (t1, t2) in taus(),
        frac in 0.05..0.95f64,
        delta in 0.001..1.0f64,
    ) {
        let m = t1 + frac * (t2 - t1);
        let (beta, gamma) = variation::solve_balance(t1, t2, m, delta).unwrap();
        let (r1, r2) = variation::balance_residuals(t1, t2, m, delta, beta, gamma);
        let scale = beta + gamma + delta;
        prop_assert!(r1.abs() < 1e-12 * scale && r2.abs() < 1e-12 * scale);
        let s = variation::s_of_m(t1, t2, m, delta).unwrap();
        prop_assert!((s - beta - gamma).abs() < 1e-10 * s);
        prop_assert!(s >= variation::s_min_closed_form(t1, t2, delta) * (1.0 - 1e-12));
    }

    #[test]
    fn relaxation_is_a_lower_bound((t1, t2) in taus(), delta in 0.001..1.0f64, nu in 0.0..1.0f64) {
        let b = variation::min_total_variation(t1, t2, delta, nu).unwrap();
        prop_assert!(b.relaxed <= b.exact);
        let gap = variation::relaxation_gap(t1, t2);
        let direct = (0.5 * (t1 + t2) + FRAC_PI_4).sin() - (0.5 * (t2 - t1) + FRAC_PI_4).sin();
        prop_assert!((gap - direct).abs() < 1e-14);
        prop_assert!(gap >= 0.0);
    }

    #[test]
    fn step_function_is_antiperiodic((t1, t2) in taus(), delta in 0.01..0.5f64, nu in 0.0..0.5f64, t in 0.0..TAU) {
        let f = variation::StepFunction::minimizer(t1, t2, delta, nu).unwrap();
        prop_assert_eq!(f.value(t + PI), -f.value(t));
        prop_assert!((f.variation_by_steps() - f.variation_closed_form()).abs() < 1e-10 * f.variation_closed_form());
    }

    #[test]
    fn csv_cells_round_trip(row in prop::array::uniform3(prop::num::f64::NORMAL)) {
        let s = csv_string(["x", "y", "z"], [row]);
        let cells: Vec<f64> = s.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        prop_assert_eq!(cells, row.to_vec());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn admissible_samples_beat_the_bound(seed in any::<u64>(), knots in 8usize..20) {
        let s = variation::sample_admissible(seed, knots).unwrap();
        prop_assert!(s.sign_pattern_holds());
        let b = variation::min_total_variation(s.tau1, s.tau2, s.delta, s.nu).unwrap();
        prop_assert!(s.variation() > b.exact);
        prop_assert!(s.variation() <= TAU + 1e-12);
        for k in 0..=4 {
            let d = (s.tau2 - s.tau1) + (FRAC_PI_2 - (s.tau2 - s.tau1)) * k as f64 / 4.0;
            prop_assert!(s.delta < bounds::dual_use_delta_bound(s.nu, d).unwrap());
        }
    }
}
