//! Named test forms and a seeded random form generator.

use num_complex::Complex;
use num_rational::BigRational;
use rand::Rng;

use crate::forms::HermitianForm;
use crate::multiindex::{enumerate_degree, MultiIndex};
use crate::rational::{rat, real, CRational};

#[derive(Clone, Debug)]
pub struct NamedForm {
    pub name: String,
    pub form: HermitianForm,
}

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

/// `f_c = |z1|^4 + |z2|^4 - c |z1|^2 |z2|^2`.
pub fn f_c(c: BigRational) -> HermitianForm {
    HermitianForm::diagonal(
        2,
        2,
        [
            (mi(&[2, 0]), rat(1, 1)),
            (mi(&[1, 1]), -c),
            (mi(&[0, 2]), rat(1, 1)),
        ],
    )
}

/// `|z1|^4 + |z2|^4 + a (z1^2 z̄2^2 + z2^2 z̄1^2)`.
pub fn g_a(a: BigRational) -> HermitianForm {
    let mut f = HermitianForm::diagonal(2, 2, [(mi(&[2, 0]), rat(1, 1)), (mi(&[0, 2]), rat(1, 1))]);
    f.set(mi(&[2, 0]), mi(&[0, 2]), real(a.clone()));
    f.set(mi(&[0, 2]), mi(&[2, 0]), real(a));
    f
}

/// `|z1^2 + z2^2|^2`: a square that vanishes on the sphere.
pub fn sum_of_squares_modulus() -> HermitianForm {
    let one = real(rat(1, 1));
    HermitianForm::squared_modulus(2, 2, &[(mi(&[2, 0]), one.clone()), (mi(&[0, 2]), one)])
}

/// `‖z‖^4` plus a small purely imaginary coupling.
pub fn perturbed_norm() -> HermitianForm {
    let mut f = HermitianForm::norm_power(2, 2);
    f.set(mi(&[2, 0]), mi(&[1, 1]), Complex::new(rat(0, 1), rat(1, 8)));
    f.set(mi(&[1, 1]), mi(&[2, 0]), Complex::new(rat(0, 1), rat(-1, 8)));
    f
}

/// `z* A z` for a positive definite hermitian `A` on `C^3`.
pub fn hermitian_quadratic() -> HermitianForm {
    let e = |i: usize| MultiIndex::unit(3, i);
    let mut f = HermitianForm::diagonal(3, 1, [(e(0), rat(2, 1)), (e(1), rat(2, 1)), (e(2), rat(1, 1))]);
    f.set(e(0), e(1), Complex::new(rat(0, 1), rat(1, 2)));
    f.set(e(1), e(0), Complex::new(rat(0, 1), rat(-1, 2)));
    f.set(e(1), e(2), real(rat(1, 2)));
    f.set(e(2), e(1), real(rat(1, 2)));
    f
}

/// Diagonal form `Σ x_i^2 - ½ Σ_{i<j} x_i x_j` in `x_i = |z_i|^2`, `n = 3`.
pub fn polya_quadratic() -> HermitianForm {
    let mut entries = Vec::new();
    for a in enumerate_degree(3, 2) {
        let v = if a.exponents().contains(&2) { rat(1, 1) } else { rat(-1, 2) };
        entries.push((a, v));
    }
    HermitianForm::diagonal(3, 2, entries)
}

/// Diagonal form `x1^3 + x2^3 - ½(x1^2 x2 + x1 x2^2)`, `n = 2`.
pub fn polya_cubic() -> HermitianForm {
    HermitianForm::diagonal(
        2,
        3,
        [
            (mi(&[3, 0]), rat(1, 1)),
            (mi(&[2, 1]), rat(-1, 2)),
            (mi(&[1, 2]), rat(-1, 2)),
            (mi(&[0, 3]), rat(1, 1)),
        ],
    )
}

/// `c = k/4` for `k = 1..=7`.
pub fn f_c_family() -> Vec<(BigRational, HermitianForm)> {
    (1..=7).map(|k| (rat(k, 4), f_c(rat(k, 4)))).collect()
}

/// Forms with `λ(f) > 0`.
pub fn positive_corpus() -> Vec<NamedForm> {
    let mut out: Vec<NamedForm> = (0..=7)
        .map(|k| NamedForm {
            name: format!("f_c(c={})", crate::rational::format_rational(&rat(k, 4))),
            form: f_c(rat(k, 4)),
        })
        .collect();
    for m in 1..=3 {
        out.push(NamedForm {
            name: format!("norm_power(n=2,m={m})"),
            form: HermitianForm::norm_power(2, m),
        });
    }
    out.extend([
        NamedForm {
            name: "g_a(a=1/4)".into(),
            form: g_a(rat(1, 4)),
        },
        NamedForm {
            name: "perturbed_norm".into(),
            form: perturbed_norm(),
        },
        NamedForm {
            name: "hermitian_quadratic".into(),
            form: hermitian_quadratic(),
        },
        NamedForm {
            name: "polya_quadratic".into(),
            form: polya_quadratic(),
        },
        NamedForm {
            name: "polya_cubic".into(),
            form: polya_cubic(),
        },
    ]);
    out
}

/// The positive corpus plus boundary cases with `λ(f) = 0`.
pub fn full_corpus() -> Vec<NamedForm> {
    let mut out = positive_corpus();
    out.push(NamedForm {
        name: "f_c(c=2)".into(),
        form: f_c(rat(2, 1)),
    });
    out.push(NamedForm {
        name: "sum_of_squares_modulus".into(),
        form: sum_of_squares_modulus(),
    });
    out
}

fn small_rational<R: Rng>(rng: &mut R) -> BigRational {
    rat(rng.random_range(-5..=5), rng.random_range(1..=4))
}

/// Random hermitian form with small rational coefficients; each
/// coefficient pair is present with probability `density`.
pub fn random_form<R: Rng>(rng: &mut R, n: usize, m: u32, density: f64) -> HermitianForm {
    let basis = enumerate_degree(n, m);
    let mut f = HermitianForm::zero(n, m);
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i..] {
            if !rng.random_bool(density) {
                continue;
            }
            if a == b {
                f.set(a.clone(), b.clone(), real(small_rational(rng)));
            } else {
                let c: CRational = Complex::new(small_rational(rng), small_rational(rng));
                f.set(b.clone(), a.clone(), c.conj());
                f.set(a.clone(), b.clone(), c);
            }
        }
    }
    f
}
