use num_complex::{Complex, Complex64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus::{f_c, random_form};
use crate::rational::{rat, real, to_f64};

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn validate_examples() {
    assert!(f_c(rat(1, 1)).validate().is_ok());
    assert!(HermitianForm::zero(2, 2).validate().is_ok());

    let i = Complex::new(rat(0, 1), rat(1, 1));
    let mut bad = HermitianForm::zero(2, 2);
    bad.set(mi(&[2, 0]), mi(&[0, 2]), i.clone());
    bad.set(mi(&[0, 2]), mi(&[2, 0]), i);
    let problems = bad.validate().unwrap_err();
    assert_eq!(problems.len(), 1);
    assert!(matches!(problems[0], Error::SymmetryViolation { .. }));

    let mut missing = HermitianForm::zero(2, 2);
    missing.set(mi(&[2, 0]), mi(&[1, 1]), real(rat(1, 1)));
    assert!(matches!(
        missing.validate().unwrap_err()[0],
        Error::SymmetryViolation { .. }
    ));
}

#[test]
fn validate_reports_degree_mismatch() {
    let mut f = HermitianForm::zero(2, 2);
    f.set(mi(&[1, 0]), mi(&[1, 0]), real(rat(1, 1)));
    let problems = f.validate().unwrap_err();
    assert_eq!(problems.len(), 1);
    assert!(matches!(problems[0], Error::DegreeMismatch { .. }));
}

#[test]
fn evaluate_examples() {
    let f = f_c(rat(1, 1));
    assert!((f.evaluate(&[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap() - 1.0).abs() < 1e-15);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((f.evaluate(&[c64(s, 0.0), c64(0.0, s)]).unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(f.evaluate(&[c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap(), 0.0);
    assert!(matches!(
        f.evaluate(&[c64(1.0, 0.0)]),
        Err(Error::DimensionMismatch { expected: 2, got: 1 })
    ));
}

#[test]
fn exact_evaluation_matches_floating() {
    let f = f_c(rat(3, 2));
    let z = [Complex::new(rat(1, 2), rat(1, 3)), Complex::new(rat(-2, 5), rat(0, 1))];
    let exact = f.evaluate_exact(&z).unwrap();
    let approx = f
        .evaluate(&[c64(0.5, 1.0 / 3.0), c64(-0.4, 0.0)])
        .unwrap();
    assert!((to_f64(&exact) - approx).abs() < 1e-14);
}

#[test]
fn quarter_laplacian_examples() {
    let z1_4 = HermitianForm::diagonal(2, 2, [(mi(&[2, 0]), rat(1, 1))]);
    let d = z1_4.quarter_laplacian().unwrap();
    assert_eq!(d, HermitianForm::diagonal(2, 1, [(mi(&[1, 0]), rat(4, 1))]));

    let d = HermitianForm::norm_power(2, 2).quarter_laplacian().unwrap();
    assert_eq!(d, HermitianForm::norm_power(2, 1).scale(&rat(6, 1)));

    assert!(HermitianForm::zero(2, 2).quarter_laplacian().unwrap().is_zero());
    assert_eq!(HermitianForm::zero(2, 0).quarter_laplacian(), Err(Error::DegreeZero));
}

#[test]
fn laplacian_of_norm_power_identity() {
    // (¼Δ)‖z‖^{2m} = m(m+n-1)‖z‖^{2(m-1)}
    for n in 1..=3usize {
        for m in 1..=4u32 {
            let d = HermitianForm::norm_power(n, m).quarter_laplacian().unwrap();
            let k = (m * (m + n as u32 - 1)) as i64;
            assert_eq!(d, HermitianForm::norm_power(n, m - 1).scale(&rat(k, 1)));
        }
    }
}

#[test]
fn lambda_min_examples() {
    let opts = SphereOptions::default();
    let r = lambda_min(&f_c(rat(1, 1)), &opts).unwrap();
    assert!((r.value - 0.25).abs() < 1e-9);
    let (a, b) = (r.point[0].norm(), r.point[1].norm());
    assert!((a - b).abs() < 1e-3);
    assert!(r.certified_bound.unwrap() <= 0.25 + 1e-12);

    let r = lambda_min(&f_c(rat(2, 1)), &opts).unwrap();
    assert!(r.value.abs() < 1e-9);

    let r = lambda_min(&HermitianForm::norm_power(3, 2), &opts).unwrap();
    assert!((r.value - 1.0).abs() < 1e-12);
}

#[test]
fn big_lambda_examples() {
    for k in 0..=8 {
        let c = rat(k, 4);
        let expected = rat(2, 1) + &c * &c / rat(4, 1);
        assert_eq!(f_c(c).big_lambda_sq(), expected);
    }
    assert_eq!(f_c(rat(1, 1)).big_lambda(), 1.5);
    assert_eq!(HermitianForm::zero(2, 2).big_lambda(), 0.0);
    for m in 1..=4 {
        let f = HermitianForm::diagonal(3, m, [(mi(&[m, 0, 0]), rat(1, 1))]);
        assert_eq!(f.big_lambda_sq(), rat(1, 1));
    }
}

#[test]
fn lambda_tilde_examples() {
    let t = f_c(rat(1, 1)).lambda_tilde();
    assert_eq!(t.value, rat(1, 1));
    assert!(!t.off_diagonal);
    assert_eq!(HermitianForm::zero(2, 2).lambda_tilde().value, rat(0, 1));
    let f = HermitianForm::diagonal(2, 2, [(mi(&[1, 1]), rat(3, 1))]);
    assert_eq!(f.lambda_tilde().value, rat(3, 2));
    assert!(crate::corpus::g_a(rat(1, 4)).lambda_tilde().off_diagonal);
}

#[test]
fn lambda_sharp_examples() {
    let opts = SphereOptions::default();
    let r = lambda_sharp(&f_c(rat(1, 1)), &opts).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9);
    let r = lambda_sharp(&HermitianForm::norm_power(2, 3), &opts).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9);
    let neg = HermitianForm::diagonal(2, 2, [(mi(&[2, 0]), rat(-1, 1))]);
    let r = lambda_sharp(&neg, &opts).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9);
}

#[test]
fn q_symbol_examples() {
    let z1_4 = HermitianForm::diagonal(2, 2, [(mi(&[2, 0]), rat(1, 1))]);
    let q = z1_4.q_symbol(&rat(1, 1)).unwrap();
    let v = q.evaluate(&[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
    // layers: |z1|^4, 4|z1|^2, (¼Δ)(4|z1|^2) = 4; q = 1 - 4 + 4/2 = -1
    assert!((v + 1.0).abs() < 1e-14);

    let f = f_c(rat(1, 1));
    let z = [c64(0.3, 0.1), c64(-0.2, 0.5)];
    let tiny = f.q_symbol(&rat(1, 1_000_000_000)).unwrap();
    assert!((tiny.evaluate(&z).unwrap() - f.evaluate(&z).unwrap()).abs() < 1e-8);

    let zero = HermitianForm::zero(2, 2).q_symbol(&rat(1, 2)).unwrap();
    assert_eq!(zero.evaluate(&z).unwrap(), 0.0);
    assert!(f.q_symbol(&rat(0, 1)).is_err());
}

#[test]
fn compiled_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_form(&mut rng, 3, 2, 0.6);
    let cf = f.compile();
    let z = [c64(0.3, -0.2), c64(0.1, 0.4), c64(-0.5, 0.2)];
    let (_, g) = cf.value_and_dzbar(&z);
    let h = 1e-6;
    for i in 0..3 {
        // ∂f/∂x_i = 2 Re g_i, ∂f/∂y_i = 2 Im g_i
        let mut zp = z;
        zp[i] += c64(h, 0.0);
        let mut zm = z;
        zm[i] -= c64(h, 0.0);
        let dx = (cf.value_unchecked(&zp) - cf.value_unchecked(&zm)) / (2.0 * h);
        assert!((dx - 2.0 * g[i].re).abs() < 1e-6);
        let mut zp = z;
        zp[i] += c64(0.0, h);
        let mut zm = z;
        zm[i] -= c64(0.0, h);
        let dy = (cf.value_unchecked(&zp) - cf.value_unchecked(&zm)) / (2.0 * h);
        assert!((dy - 2.0 * g[i].im).abs() < 1e-6);
    }
}

fn arb_form() -> impl Strategy<Value = HermitianForm> {
    (any::<u64>(), 1usize..=3, 1u32..=3).prop_map(|(seed, n, m)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_form(&mut rng, n, m, 0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_forms_are_real_valued(f in arb_form(), seed in any::<u64>()) {
        for z in unit_sphere_samples(f.n(), 8, seed) {
            prop_assert!(f.evaluate(&z).is_ok());
        }
    }

    #[test]
    fn laplacian_frobenius_step(f in arb_form()) {
        let (n, m) = (f.n() as i64, f.m() as i64);
        let d = f.quarter_laplacian().unwrap();
        prop_assert!(d.big_lambda_sq() <= rat(n * n * m.pow(4), 1) * f.big_lambda_sq());
    }

    #[test]
    fn laplacian_powers_terminate(f in arb_form()) {
        let top = f.quarter_laplacian_power(f.m()).unwrap();
        prop_assert_eq!(top.m(), 0);
        prop_assert_eq!(top.quarter_laplacian(), Err(Error::DegreeZero));
    }

    #[test]
    fn sampled_values_within_lambda_bounds(f in arb_form(), seed in any::<u64>()) {
        let big = f.big_lambda();
        let opts = SphereOptions { random_starts: 8, certify: false, ..SphereOptions::default() };
        let low = lambda_min(&f, &opts).unwrap().value;
        let slack = 1e-9 * f.coefficient_abs_sum().max(1.0);
        for z in unit_sphere_samples(f.n(), 32, seed) {
            let v = f.evaluate(&z).unwrap();
            prop_assert!(v.abs() <= big * (1.0 + 1e-12) + 1e-15);
            prop_assert!(low <= v + slack);
        }
    }
}
