use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus::{f_c, random_form, sum_of_squares_modulus};
use crate::multiindex::factorial;
use crate::rational::{from_biguint, rat, real};

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

fn opts() -> MultiplierOptions {
    MultiplierOptions::default()
}

/// Coefficients of `⟨z, z̄⟩^N f` by repeated polynomial multiplication.
fn expand_brute_force(form: &HermitianForm, shift: u32) -> BTreeMap<(MultiIndex, MultiIndex), CRational> {
    let n = form.n();
    let mut poly: BTreeMap<(MultiIndex, MultiIndex), CRational> = form
        .terms()
        .map(|(a, b, c)| ((a.clone(), b.clone()), c.clone()))
        .collect();
    for _ in 0..shift {
        let mut next: BTreeMap<(MultiIndex, MultiIndex), CRational> = BTreeMap::new();
        for ((a, b), c) in &poly {
            for i in 0..n {
                let e = MultiIndex::unit(n, i);
                *next.entry((a.add(&e), b.add(&e))).or_insert_with(CRational::zero) += c;
            }
        }
        poly = next;
    }
    poly.retain(|_, v| !v.is_zero());
    poly
}

fn matches_brute_force(form: &HermitianForm, shift: u32) -> bool {
    let matrix = multiplier_matrix(form, shift, &opts()).unwrap();
    let scale = from_biguint(&factorial(shift));
    let scaled = matrix.scaled(&scale);
    let expected = expand_brute_force(form, shift);
    let basis = matrix.basis();
    let got: BTreeMap<(MultiIndex, MultiIndex), CRational> = scaled
        .entries()
        .iter()
        .map(|(&(i, j), v)| ((basis[i].clone(), basis[j].clone()), v.clone()))
        .collect();
    got == expected
}

#[test]
fn shift_zero_reproduces_coefficients() {
    let f = f_c(rat(1, 1));
    let m0 = multiplier_matrix(&f, 0, &opts()).unwrap();
    assert_eq!(m0.dim(), 3);
    for (a, b, c) in f.terms() {
        assert_eq!(&m0.get(a.rank(), b.rank()), c);
    }
    assert_eq!(m0.entries().len(), f.nnz());
}

#[test]
fn f_c_diagonal_matches_recurrence() {
    // diagonal entry at ρ is Σ_α c_α/(ρ-α)!, a positive multiple of
    // ρ1(ρ1-1) + ρ2(ρ2-1) - c ρ1 ρ2
    for k in 0..=8 {
        let c = rat(k, 4);
        let f = f_c(c.clone());
        for shift in 0..=6u32 {
            let matrix = multiplier_matrix(&f, shift, &opts()).unwrap();
            assert!(matrix.is_diagonal());
            for (idx, rho) in matrix.basis().iter().enumerate() {
                let (r1, r2) = (rho.get(0) as i64, rho.get(1) as i64);
                // Σ over μ = ρ - α with α ∈ {(2,0),(1,1),(0,2)} of c_α/μ!
                let fact = |a: i64, b: i64| -> Option<BigRational> {
                    if a < 0 || b < 0 {
                        None
                    } else {
                        Some(crate::rational::recip_biguint(
                            &(factorial(a as u32) * factorial(b as u32)),
                        ))
                    }
                };
                let mut expected = BigRational::zero();
                if let Some(w) = fact(r1 - 2, r2) {
                    expected += w;
                }
                if let Some(w) = fact(r1, r2 - 2) {
                    expected += w;
                }
                if let Some(w) = fact(r1 - 1, r2 - 1) {
                    expected -= w * &c;
                }
                assert_eq!(matrix.get(idx, idx).re, expected);
                // sign agrees with ρ1(ρ1-1) + ρ2(ρ2-1) - c ρ1 ρ2
                let poly = rat(r1 * (r1 - 1) + r2 * (r2 - 1), 1) - &c * rat(r1 * r2, 1);
                assert_eq!(expected.is_zero(), poly.is_zero());
                assert_eq!(expected > BigRational::zero(), poly > BigRational::zero());
            }
        }
    }
}

#[test]
fn single_variable_shift_example() {
    // f = |z1|^2 in n = 2, N = 1: ⟨z,z̄⟩|z1|^2 = |z1|^4 + |z1 z2|^2
    let f = HermitianForm::diagonal(2, 1, [(mi(&[1, 0]), rat(1, 1))]);
    let m1 = multiplier_matrix(&f, 1, &opts()).unwrap();
    assert_eq!(m1.get(mi(&[2, 0]).rank(), mi(&[2, 0]).rank()), real(rat(1, 1)));
    assert_eq!(m1.get(mi(&[1, 1]).rank(), mi(&[1, 1]).rank()), real(rat(1, 1)));
    assert!(m1.get(mi(&[0, 2]).rank(), mi(&[0, 2]).rank()).is_zero());
    assert_eq!(m1.entries().len(), 2);
}

#[test]
fn size_cap_is_enforced() {
    let f = f_c(rat(1, 1));
    let small = MultiplierOptions {
        size_cap: 5,
        ..opts()
    };
    assert!(multiplier_matrix(&f, 2, &small).is_ok());
    assert_eq!(
        multiplier_matrix(&f, 3, &small),
        Err(Error::SizeCapExceeded { dim: 6, cap: 5 })
    );
}

#[test]
fn psd_examples() {
    let f = f_c(rat(1, 1));
    let m0 = multiplier_matrix(&f, 0, &opts()).unwrap();
    let r = is_psd(&m0, PsdMode::Exact).unwrap();
    assert!(!r.psd);
    let Some(Witness::Exact(w)) = r.witness else {
        panic!("expected exact witness")
    };
    let e11 = mi(&[1, 1]).rank();
    for (i, v) in w.iter().enumerate() {
        assert_eq!(v.is_zero(), i != e11);
    }
    assert!(m0.quadratic_form(&w).re < BigRational::zero());

    let m1 = multiplier_matrix(&f, 1, &opts()).unwrap();
    let r = is_psd(&m1, PsdMode::Exact).unwrap();
    assert!(r.psd);
    // diagonal entries at (2,1) and (1,2) vanish
    assert_eq!(r.zero_pivots, 2);
    assert_eq!(r.rank, 2);

    let fl = is_psd(&m1, PsdMode::floating()).unwrap();
    assert!(fl.psd);
    let fl0 = is_psd(&m0, PsdMode::floating()).unwrap();
    assert!(!fl0.psd);
    assert!((fl0.min_eigenvalue.unwrap() + 1.0).abs() < 1e-12);

    let id = MultiplierMatrix::from_entries(
        2,
        1,
        0,
        (0..2).map(|i| ((i, i), CRational::one())).collect(),
    );
    assert!(is_psd(&id, PsdMode::Exact).unwrap().psd);
}

#[test]
fn zero_pivot_coupling_gives_witness() {
    // [[0, 1], [1, 0]] is indefinite with zero diagonal
    let entries = [((0, 1), CRational::one()), ((1, 0), CRational::one())];
    let m = MultiplierMatrix::from_entries(2, 1, 0, entries.into_iter().collect());
    let r = is_psd(&m, PsdMode::Exact).unwrap();
    assert!(!r.psd);
    let Some(Witness::Exact(w)) = r.witness else {
        panic!("expected exact witness")
    };
    assert!(m.quadratic_form(&w).re < BigRational::zero());
}

#[test]
fn indeterminate_floating_band() {
    let tiny = rat(-1, 1_000_000_000_000);
    let entries = [((0, 0), CRational::one()), ((1, 1), real(tiny))];
    let m = MultiplierMatrix::from_entries(2, 1, 0, entries.into_iter().collect());
    assert!(!is_psd(&m, PsdMode::Exact).unwrap().psd);
    // λ_min = -1e-12 against bands at -tol and -100·tol
    assert!(is_psd(&m, PsdMode::floating()).unwrap().psd);
    assert!(matches!(
        is_psd(&m, PsdMode::Floating { tolerance: 1e-13 }),
        Err(Error::NumericalIndeterminate { .. })
    ));
    assert!(!is_psd(&m, PsdMode::Floating { tolerance: 1e-15 }).unwrap().psd);
}

#[test]
fn minimal_shift_examples() {
    assert_eq!(minimal_sos_n(&f_c(rat(1, 1)), 10, &opts()), Ok(1));
    assert_eq!(minimal_sos_n(&f_c(rat(3, 2)), 10, &opts()), Ok(5));
    assert_eq!(minimal_sos_n(&sum_of_squares_modulus(), 10, &opts()), Ok(0));
    assert_eq!(minimal_sos_n(&HermitianForm::norm_power(2, 3), 10, &opts()), Ok(0));
    assert_eq!(
        minimal_sos_n(&f_c(rat(2, 1)), 12, &opts()),
        Err(Error::NotFound { n_max: 12 })
    );
}

#[test]
fn certificate_examples() {
    let z1_4 = HermitianForm::diagonal(2, 2, [(mi(&[2, 0]), rat(1, 1))]);
    let cert = sos_decompose(&z1_4, 0, CertificateMode::Exact, &opts()).unwrap();
    assert_eq!(cert.squares.len(), 1);
    let Square::Exact {
        weight,
        coefficients,
    } = &cert.squares[0]
    else {
        panic!("exact square expected")
    };
    assert_eq!(weight, &rat(1, 1));
    assert_eq!(coefficients, &vec![(mi(&[2, 0]).rank(), CRational::one())]);

    let f = f_c(rat(1, 1));
    let cert = sos_decompose(&f, 1, CertificateMode::Exact, &opts()).unwrap();
    assert!(cert.squares.len() <= 4);
    assert_eq!(cert.verification, Verification::ExactPass);
    assert_eq!(verify_certificate(&f, &cert, &opts()), Verification::ExactPass);

    assert_eq!(
        sos_decompose(&f, 0, CertificateMode::Exact, &opts()),
        Err(Error::NotPsd { shift: 0 })
    );

    let mut tampered = cert.clone();
    if let Square::Exact { coefficients, .. } = &mut tampered.squares[0] {
        coefficients[0].1 += CRational::one();
    }
    assert!(matches!(
        verify_certificate(&f, &tampered, &opts()),
        Verification::Fail { .. }
    ));

    let float = sos_decompose(&f, 1, CertificateMode::Floating, &opts()).unwrap();
    match verify_certificate(&f, &float, &opts()) {
        Verification::FloatPass { residual } => assert!(residual <= 1e-10),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn certificate_for_other_form_fails() {
    let f = f_c(rat(1, 1));
    let cert = sos_decompose(&f, 1, CertificateMode::Exact, &opts()).unwrap();
    let g = f_c(rat(1, 2));
    assert!(!verify_certificate(&g, &cert, &opts()).passed());
}

#[test]
fn complex_certificate_round_trip() {
    let i = Complex::new(rat(0, 1), rat(1, 1));
    let poly = [(mi(&[2, 0]), CRational::one()), (mi(&[1, 1]), i), (mi(&[0, 2]), real(rat(-1, 2)))];
    let f = HermitianForm::squared_modulus(2, 2, &poly) + HermitianForm::norm_power(2, 2);
    for shift in 0..=2 {
        let cert = sos_decompose(&f, shift, CertificateMode::Exact, &opts()).unwrap();
        assert_eq!(cert.verification, Verification::ExactPass);
        let float = sos_decompose(&f, shift, CertificateMode::Floating, &opts()).unwrap();
        assert!(float.verification.passed());
        assert!(float.squares.len() <= float.basis.len());
    }
}

#[test]
fn floating_certificates_on_corpus() {
    for nf in crate::corpus::positive_corpus() {
        let shift = minimal_sos_n(&nf.form, 20, &opts()).unwrap();
        let cert = sos_decompose(&nf.form, shift + 1, CertificateMode::Floating, &opts()).unwrap();
        assert!(cert.verification.passed(), "{}", nf.name);
        assert!(cert.squares.len() <= cert.basis.len());
    }
}

#[test]
fn brute_force_oracle_on_corpus() {
    for nf in crate::corpus::full_corpus() {
        for shift in 0..=3 {
            assert!(matches_brute_force(&nf.form, shift), "{} at N = {shift}", nf.name);
        }
    }
}

#[test]
fn execution_policies_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_form(&mut rng, 3, 2, 0.7);
    let seq = multiplier_matrix(
        &f,
        3,
        &MultiplierOptions {
            execution: Execution::Sequential,
            ..opts()
        },
    )
    .unwrap();
    let par = multiplier_matrix(
        &f,
        3,
        &MultiplierOptions {
            execution: Execution::Parallel,
            ..opts()
        },
    )
    .unwrap();
    assert_eq!(seq, par);
}

fn arb_form() -> impl Strategy<Value = HermitianForm> {
    (any::<u64>(), 1usize..=3, 1u32..=2).prop_map(|(seed, n, m)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_form(&mut rng, n, m, 0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multiplier_matches_expansion(f in arb_form(), shift in 0u32..=3) {
        prop_assert!(matches_brute_force(&f, shift));
    }

    #[test]
    fn multiplier_is_hermitian(f in arb_form(), shift in 0u32..=3) {
        prop_assert!(multiplier_matrix(&f, shift, &opts()).unwrap().is_hermitian());
    }

    #[test]
    fn psd_is_monotone(f in arb_form()) {
        // shift the form towards positivity so both verdicts occur
        let shape = (f.n(), f.m());
        let g = f + HermitianForm::norm_power(shape.0, shape.1).scale(&rat(4, 1));
        let mut seen = false;
        for shift in 0..=3 {
            let psd = is_psd(&multiplier_matrix(&g, shift, &opts()).unwrap(), PsdMode::Exact).unwrap().psd;
            prop_assert!(!seen || psd);
            seen |= psd;
        }
    }

    #[test]
    fn exact_and_floating_verdicts_agree(f in arb_form(), shift in 0u32..=2) {
        let m = multiplier_matrix(&f, shift, &opts()).unwrap();
        let exact = is_psd(&m, PsdMode::Exact).unwrap();
        if let Ok(fl) = is_psd(&m, PsdMode::floating()) {
            prop_assert_eq!(exact.psd, fl.psd);
        }
        if let Some(Witness::Exact(w)) = &exact.witness {
            prop_assert!(m.quadratic_form(w).re < BigRational::zero());
        }
    }

    #[test]
    fn certificates_round_trip(f in arb_form(), shift in 0u32..=2) {
        let shape = (f.n(), f.m());
        let g = f + HermitianForm::norm_power(shape.0, shape.1).scale(&rat(8, 1));
        match sos_decompose(&g, shift, CertificateMode::Exact, &opts()) {
            Ok(cert) => prop_assert_eq!(verify_certificate(&g, &cert, &opts()), Verification::ExactPass),
            Err(e) => prop_assert_eq!(e, Error::NotPsd { shift }),
        }
        match sos_decompose(&g, shift, CertificateMode::Floating, &opts()) {
            Ok(cert) => prop_assert!(verify_certificate(&g, &cert, &opts()).passed()),
            Err(e) => {
                let expected = matches!(e, Error::NotPsd { .. } | Error::NumericalIndeterminate { .. });
                prop_assert!(expected);
            }
        }
    }
}
