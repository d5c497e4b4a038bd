use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma_lr;

use super::*;
use crate::corpus::{f_c, random_form};
use crate::rational::rat;

#[test]
fn sigma_window_examples() {
    assert!(WindowCheck::new(1.2, 0.9).pass());
    assert!(!WindowCheck::new(1.6, 0.9).pass());
    assert!(!WindowCheck::new(1.6, 0.9).sigma_range);
    for eps in [0.01, 0.5, 1.0] {
        assert!(WindowCheck::new(1.0 + 1e-9, eps).pass());
    }
    assert!(!WindowCheck::new(1.0, 0.5).pass());
    // near 3/2 the window needs ε ≥ 2, so it is empty
    let edge = WindowCheck::new(1.5 - 1e-9, 1.0);
    assert!(edge.sigma_range && !edge.epsilon_range && !edge.upper_containment);
    assert!(!WindowCheck::new(1.2, 0.7).pass());
    let report = check_sigma_window(&RegimeParams::new(1.0 / 100.0, 102, 2, 2, 0.5));
    assert!(report.pass);
    assert_eq!(report.parameters["sigma"], 1.05);
}

#[test]
fn regime_params_standard() {
    let p = RegimeParams::standard(100, 2, 2);
    assert_eq!(p.degree, 102);
    assert!((p.sigma - 1.05).abs() < 1e-15);
    assert!((p.epsilon - 0.01f64.cbrt()).abs() < 1e-15);
    assert_eq!(RegimeParams::from_h(1.0 / 300.0, 2, 2).shift, 300);
    assert_eq!(RegimeParams::standard(1, 1, 1).epsilon, 1.0);
}

#[test]
fn laplacian_power_checks() {
    let f = HermitianForm::norm_power(2, 2);
    let reports = check_laplacian_powers(&f, 2000, 1, Execution::default()).unwrap();
    assert!(reports.iter().all(|r| r.pass));
    let j1 = reports
        .iter()
        .find(|r| r.check == "laplacian_power_max" && r.parameters["j"] == 1.0)
        .unwrap();
    assert!((j1.lhs - 6.0).abs() < 1e-12);
    assert!((j1.rhs - 8.0 * f.big_lambda()).abs() < 1e-12);

    let zero = HermitianForm::zero(2, 2);
    let reports = check_laplacian_powers(&zero, 100, 1, Execution::default()).unwrap();
    assert!(reports.iter().all(|r| r.pass && r.lhs == 0.0 && r.rhs == 0.0));
}

#[test]
fn radial_integral_examples() {
    let r = radial_i1(0.3, 0, 4).unwrap();
    assert!((r.lhs - 1.0).abs() < 1e-9 && r.pass);
    for m in [0, 5, 17] {
        let r = radial_i1(0.1, m, 1).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-8 && r.pass);
    }
    let r = radial_i1(1.0 / 12.0, 10, 3).unwrap();
    assert_eq!(r.rhs.round(), 66.0);
    assert!(r.pass);
    assert!(radial_i1(0.0, 1, 1).is_err());
}

#[test]
fn tail_integral_examples() {
    let reports = tail_j(50.0, 0.2).unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r.pass));
    assert!(reports[2].ratio.is_finite() && reports[2].ratio > 0.0);

    let reports = tail_j(10.0, 1.0 - 1e-9).unwrap();
    assert!(reports[0].lhs < 1e-80);
    assert!(reports[0].rhs > 0.0);
    assert!(reports.iter().all(|r| r.pass));
    assert!(tail_j(10.0, 1.0).is_err());
}

#[test]
fn tail_integrals_against_incomplete_gamma() {
    // ∫_0^x t^ρ e^{-ρt} dt = Γ(ρ+1) ρ^{-ρ-1} P(ρ+1, ρx)
    for &(rho, delta) in &[(5.0, 0.3), (20.0, 0.5), (100.0, 0.1)] {
        let reports = tail_j(rho, delta).unwrap();
        let scale = (ln_gamma(rho + 1.0) - (rho + 1.0) * rho.ln()).exp();
        let minus = scale * gamma_lr(rho + 1.0, rho * (1.0 - delta));
        let plus = scale * (1.0 - gamma_lr(rho + 1.0, rho * (1.0 + delta)));
        assert!((reports[0].lhs - minus).abs() <= 1e-8 * minus);
        assert!((reports[1].lhs - plus).abs() <= 1e-8 * plus);
    }
}

#[test]
fn elementary_inequality_grid() {
    let r = elementary_inequality(99);
    assert!(r.pass);
    assert!(r.lhs < 0.0);
}

#[test]
fn localization_formula_matches_quadrature() {
    for &(h, degree, k, n, eps) in &[
        (0.01, 102u32, 2u32, 2usize, 0.2154),
        (0.125, 6, 2, 2, 0.6),
        (0.05, 20, 0, 1, 0.5),
        (0.02, 55, 3, 3, 0.4),
    ] {
        let exact = localization_norm(h, degree, k, n, eps).unwrap();
        let quad = localization_norm_quadrature(h, degree, k, n, eps).unwrap();
        assert!((exact - quad).abs() <= 1e-8 * quad.max(1e-300), "{exact} vs {quad}");
        let (inside, outside) = localization_split(h, degree, k, n, eps).unwrap();
        let total = (k as f64 * h.ln() + ln_gamma((degree + k) as f64 + n as f64)
            - ln_gamma((degree as usize + n) as f64))
        .exp();
        assert!((inside + outside - total).abs() <= 1e-10 * total);
    }
}

#[test]
fn localization_is_sub_probability_for_k_zero() {
    for eps in [0.05, 0.3, 1.0] {
        let v = localization_norm(0.01, 100, 0, 2, eps).unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn localization_report_and_window() {
    let p = RegimeParams::standard(100, 2, 2);
    let report = localization_e(&p, 2, 1.0).unwrap();
    assert!(report.lhs > 0.0 && report.rhs > 0.0);
    assert!(report.ratio.is_finite());
    let bad = RegimeParams::standard(10, 2, 2);
    assert!(matches!(localization_e(&bad, 2, 1.0), Err(Error::WindowViolated { .. })));
}

#[test]
fn localization_monte_carlo_small() {
    // n = 1 with fewer samples; the acceptance suite runs the large case
    let (h, degree, k, n, eps) = (0.125, 6, 2, 1, 0.6);
    let exact = localization_norm(h, degree, k, n, eps).unwrap();
    let est = localization_monte_carlo(h, degree, k, n, eps, 100_000, 5, Execution::default());
    assert!((est.mean - exact).abs() <= 4.0 * est.std_error, "{est:?} vs {exact}");
}

#[test]
fn monte_carlo_is_deterministic_across_policies() {
    let a = localization_monte_carlo(0.125, 6, 2, 2, 0.6, 10_000, 7, Execution::Sequential);
    let b = localization_monte_carlo(0.125, 6, 2, 2, 0.6, 10_000, 7, Execution::Parallel);
    assert_eq!(a, b);
}

#[test]
fn basic_rhs_examples() {
    let f = f_c(rat(1, 1));
    let inv = FormInvariants {
        lambda: 0.25,
        big_lambda: 1.5,
    };
    let r = basic_rhs(&f, &inv, &RegimeParams::standard(2000, 2, 2), 500, 3).unwrap();
    assert!(r.positive);
    assert!(r.annulus_check.unwrap().pass);
    assert!(matches!(
        basic_rhs(&f, &inv, &RegimeParams::standard(20, 2, 2), 0, 0),
        Err(Error::WindowViolated { .. })
    ));

    let zero = HermitianForm::zero(2, 2);
    let none = FormInvariants {
        lambda: 0.0,
        big_lambda: 0.0,
    };
    let r = basic_rhs(&zero, &none, &RegimeParams::standard(2000, 2, 2), 0, 0).unwrap();
    assert_eq!(r.value, 0.0);
}

#[test]
fn basic_rhs_converges_to_lambda() {
    let f = f_c(rat(1, 1));
    let inv = FormInvariants {
        lambda: 0.25,
        big_lambda: 1.5,
    };
    let values: Vec<f64> = [1_000u32, 10_000, 100_000, 1_000_000]
        .iter()
        .map(|&s| basic_rhs(&f, &inv, &RegimeParams::standard(s, 2, 2), 0, 0).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]));
    assert!((values[3] - 0.25).abs() < 0.01);
}

#[test]
fn empirical_threshold_examples() {
    let f = f_c(rat(1, 1));
    let inv = FormInvariants::compute(&f, &SphereOptions::default()).unwrap();
    let report = empirical_h0(&f, &inv, &default_h_grid(200_000), Execution::default()).unwrap();
    assert!(report.implied_n >= 1);
    assert!(report.rhs > 0.0);

    let g = HermitianForm::norm_power(2, 2);
    let inv_g = FormInvariants::compute(&g, &SphereOptions::default()).unwrap();
    let report_g = empirical_h0(&g, &inv_g, &default_h_grid(200_000), Execution::default()).unwrap();
    assert!(report_g.implied_n <= report.implied_n);

    let flat = FormInvariants {
        lambda: 0.0,
        big_lambda: 2.0,
    };
    assert_eq!(
        empirical_h0(&f_c(rat(2, 1)), &flat, &default_h_grid(1000), Execution::default()),
        Err(Error::NoPositiveFound)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn annulus_bound_holds_for_random_forms(seed in any::<u64>(), shift in 300u32..3000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng, 2, 2, 0.6) + HermitianForm::norm_power(2, 2).scale(&rat(6, 1));
        let opts = SphereOptions { random_starts: 16, ..SphereOptions::default() };
        let inv = FormInvariants::compute(&f, &opts).unwrap();
        let params = RegimeParams::standard(shift, 2, 2);
        let r = basic_rhs(&f, &inv, &params, 400, seed).unwrap();
        prop_assert!(r.annulus_check.unwrap().pass);
    }

    #[test]
    fn localization_split_is_consistent(h in 0.005f64..0.2, degree in 1u32..80, k in 0u32..4, n in 1usize..4, eps in 0.05f64..1.0) {
        let (inside, outside) = localization_split(h, degree, k, n, eps).unwrap();
        prop_assert!(inside >= 0.0 && outside >= 0.0);
        let total = (k as f64 * h.ln() + ln_gamma((degree + k) as f64 + n as f64)
            - ln_gamma((degree as usize + n) as f64)).exp();
        prop_assert!((inside + outside - total).abs() <= 1e-9 * total);
    }
}
