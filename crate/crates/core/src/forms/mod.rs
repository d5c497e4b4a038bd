//! Bihomogeneous hermitian forms `f(z, z̄) = Σ c_{αβ} z^α z̄^β`.
//!
//! Coefficients are exact complex rationals; only nonzero entries are
//! stored. Floating-point evaluation goes through [`CompiledForm`], which
//! caches the terms as `Complex64`.

mod sphere;

pub use sphere::{
    lambda_min, lambda_sharp, unit_sphere_samples, SphereExtremum, SphereOptions,
};

use std::collections::BTreeMap;

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::multiindex::{enumerate_degree, factorial, MultiIndex};
use crate::rational::{from_biguint, norm_sqr, rat_int, real, recip_biguint, to_c64, CRational};

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    n: usize,
    m: u32,
    coeffs: BTreeMap<(MultiIndex, MultiIndex), CRational>,
}

impl HermitianForm {
    pub fn zero(n: usize, m: u32) -> Self {
        assert!(n >= 1, "need at least one variable");
        HermitianForm {
            n,
            m,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a form from `(α, β, c_{αβ})` triples; repeated keys accumulate.
    pub fn from_terms<I>(n: usize, m: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, MultiIndex, CRational)>,
    {
        let mut f = HermitianForm::zero(n, m);
        for (a, b, c) in terms {
            f.add_term(a, b, c);
        }
        f
    }

    /// Diagonal form `Σ w_α |z^α|^2`.
    pub fn diagonal<I>(n: usize, m: u32, entries: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, BigRational)>,
    {
        HermitianForm::from_terms(n, m, entries.into_iter().map(|(a, w)| (a.clone(), a, real(w))))
    }

    /// `⟨z, z̄⟩^m = Σ_{|μ|=m} (m!/μ!) |z^μ|^2`.
    pub fn norm_power(n: usize, m: u32) -> Self {
        HermitianForm::diagonal(
            n,
            m,
            enumerate_degree(n, m)
                .into_iter()
                .map(|mu| {
                    let w = from_biguint(&mu.multinomial());
                    (mu, w)
                }),
        )
    }

    /// `|P(z)|^2` for a homogeneous polynomial `P = Σ p_α z^α`.
    pub fn squared_modulus(n: usize, m: u32, poly: &[(MultiIndex, CRational)]) -> Self {
        let mut f = HermitianForm::zero(n, m);
        for (a, pa) in poly {
            for (b, pb) in poly {
                f.add_term(a.clone(), b.clone(), pa * pb.conj());
            }
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Bidegree.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sets a coefficient, dropping the entry when `c` is zero.
    pub fn set(&mut self, alpha: MultiIndex, beta: MultiIndex, c: CRational) {
        if c.is_zero() {
            self.coeffs.remove(&(alpha, beta));
        } else {
            self.coeffs.insert((alpha, beta), c);
        }
    }

    pub fn add_term(&mut self, alpha: MultiIndex, beta: MultiIndex, c: CRational) {
        let key = (alpha, beta);
        let sum = match self.coeffs.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.coeffs.insert(key, sum);
        }
    }

    pub fn coefficient(&self, alpha: &MultiIndex, beta: &MultiIndex) -> CRational {
        self.coeffs
            .get(&(alpha.clone(), beta.clone()))
            .cloned()
            .unwrap_or_else(CRational::zero)
    }

    /// Nonzero terms in graded-lex order on `α`, then `β`.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &CRational)> {
        self.coeffs.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn is_diagonal(&self) -> bool {
        self.coeffs.keys().all(|(a, b)| a == b)
    }

    /// Checks homogeneity and hermitian symmetry. Returns every violation.
    pub fn validate(&self) -> std::result::Result<(), Vec<Error>> {
        let mut problems = Vec::new();
        for ((a, b), c) in &self.coeffs {
            let indices: &[&MultiIndex] = if a == b { &[a] } else { &[a, b] };
            for idx in indices {
                if idx.len() != self.n || idx.degree() != self.m {
                    problems.push(Error::DegreeMismatch {
                        index: (*idx).clone(),
                        expected: self.n,
                        degree: self.m,
                    });
                }
            }
            // report each asymmetric pair once
            if a <= b {
                let mirror = self.coefficient(b, a);
                if mirror != c.conj() {
                    problems.push(Error::SymmetryViolation {
                        alpha: a.clone(),
                        beta: b.clone(),
                    });
                }
            } else if !self.coeffs.contains_key(&(b.clone(), a.clone())) {
                problems.push(Error::SymmetryViolation {
                    alpha: b.clone(),
                    beta: a.clone(),
                });
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }

    pub fn scale(&self, t: &BigRational) -> Self {
        let mut out = HermitianForm::zero(self.n, self.m);
        for ((a, b), c) in &self.coeffs {
            out.set(a.clone(), b.clone(), Complex::new(&c.re * t, &c.im * t));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat_int(-1))
    }

    /// `Σ |c_{αβ}|` in double precision.
    pub fn coefficient_abs_sum(&self) -> f64 {
        self.coeffs.values().map(|c| to_c64(c).norm()).sum()
    }

    pub fn compile(&self) -> CompiledForm {
        CompiledForm::new(self)
    }

    /// Floating-point value at `z`; fails if the raw sum is not real to
    /// within `1e-12 · Σ|c| · ‖z‖^{2m}`.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<f64> {
        self.compile().evaluate(z)
    }

    /// Exact value at a point with complex-rational coordinates.
    pub fn evaluate_exact(&self, z: &[CRational]) -> Result<BigRational> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let zbar: Vec<CRational> = z.iter().map(|w| w.conj()).collect();
        let mut sum = CRational::zero();
        for ((a, b), c) in &self.coeffs {
            sum += c * monomial_exact(z, a) * monomial_exact(&zbar, b);
        }
        if !sum.im.is_zero() {
            return Err(Error::NonRealValue {
                imag: crate::rational::to_f64(&sum.im),
                tol: 0.0,
            });
        }
        Ok(sum.re)
    }

    /// `(¼Δ) f` with `¼Δ = Σ_i ∂_{z_i} ∂_{z̄_i}`:
    /// `d_{γρ} = Σ_i (γ_i+1)(ρ_i+1) c_{γ+e_i, ρ+e_i}`.
    pub fn quarter_laplacian(&self) -> Result<HermitianForm> {
        if self.m == 0 {
            return Err(Error::DegreeZero);
        }
        let mut out = HermitianForm::zero(self.n, self.m - 1);
        for ((a, b), c) in &self.coeffs {
            for i in 0..self.n {
                let (ai, bi) = (a.get(i), b.get(i));
                if ai == 0 || bi == 0 {
                    continue;
                }
                let e = MultiIndex::unit(self.n, i);
                let gamma = a.checked_sub(&e).expect("ai > 0");
                let rho = b.checked_sub(&e).expect("bi > 0");
                let w = rat_int(ai as i64 * bi as i64);
                out.add_term(gamma, rho, Complex::new(&c.re * &w, &c.im * &w));
            }
        }
        Ok(out)
    }

    /// `(¼Δ)^j f`; the zero form of bidegree `m - j` once `j > m` is not
    /// representable, so `j ≤ m` is required.
    pub fn quarter_laplacian_power(&self, j: u32) -> Result<HermitianForm> {
        if j > self.m {
            return Err(Error::InvalidArgument(format!(
                "laplacian power {j} exceeds bidegree {}",
                self.m
            )));
        }
        let mut g = self.clone();
        for _ in 0..j {
            g = g.quarter_laplacian()?;
        }
        Ok(g)
    }

    /// `Λ(f)^2 = Σ (α! β! / m!^2) |c_{αβ}|^2`, exactly.
    pub fn big_lambda_sq(&self) -> BigRational {
        let mfact_sq = factorial(self.m).pow(2u32);
        let mut acc = BigRational::zero();
        for ((a, b), c) in &self.coeffs {
            acc += from_biguint(&(a.factorial() * b.factorial())) * norm_sqr(c);
        }
        acc * recip_biguint(&mfact_sq)
    }

    /// `Λ(f)`; square root taken in floating point.
    pub fn big_lambda(&self) -> f64 {
        crate::rational::to_f64(&self.big_lambda_sq()).sqrt()
    }

    /// `Λ̃(f) = max_{|α|=m} (α!/m!) |c_{αα}|`, exact.
    pub fn lambda_tilde(&self) -> LambdaTilde {
        let mfact = factorial(self.m);
        let value = self
            .coeffs
            .iter()
            .filter(|((a, b), _)| a == b)
            .map(|((a, _), c)| from_biguint(&a.factorial()) * recip_biguint(&mfact) * c.re.abs())
            .max()
            .unwrap_or_else(BigRational::zero);
        LambdaTilde {
            value,
            off_diagonal: !self.is_diagonal(),
        }
    }

    /// Weighted layers of `q = Σ_j (h^j/j!)(-¼Δ)^j f`.
    pub fn q_symbol(&self, h: &BigRational) -> Result<QSymbol> {
        if !h.is_positive() {
            return Err(Error::InvalidArgument("h must be positive".into()));
        }
        let mut layers = Vec::with_capacity(self.m as usize + 1);
        let mut current = self.clone();
        let mut weight = BigRational::one();
        for j in 0..=self.m {
            if j > 0 {
                current = current.quarter_laplacian()?;
                weight = -weight * h / rat_int(j as i64);
            }
            layers.push(QLayer {
                j,
                weight: weight.clone(),
                form: current.clone(),
            });
        }
        Ok(QSymbol {
            h: h.clone(),
            layers,
        })
    }
}

impl std::ops::Add for HermitianForm {
    type Output = HermitianForm;

    /// Panics if the shapes differ.
    fn add(mut self, other: HermitianForm) -> HermitianForm {
        assert_eq!((self.n, self.m), (other.n, other.m), "forms of different shape");
        for ((a, b), c) in other.coeffs {
            self.add_term(a, b, c);
        }
        self
    }
}

fn monomial_exact(z: &[CRational], a: &MultiIndex) -> CRational {
    let mut acc = CRational::one();
    for (zi, &e) in z.iter().zip(a.exponents()) {
        for _ in 0..e {
            acc *= zi;
        }
    }
    acc
}

/// `Λ̃(f)` together with whether the form had off-diagonal terms (in which
/// case the diagonal bound it feeds does not apply).
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaTilde {
    pub value: BigRational,
    pub off_diagonal: bool,
}

#[derive(Clone, Debug)]
pub struct QLayer {
    pub j: u32,
    /// `(-1)^j h^j / j!`
    pub weight: BigRational,
    /// `(¼Δ)^j f`, bidegree `m - j`.
    pub form: HermitianForm,
}

#[derive(Clone, Debug)]
pub struct QSymbol {
    pub h: BigRational,
    pub layers: Vec<QLayer>,
}

impl QSymbol {
    pub fn evaluate(&self, z: &[Complex64]) -> Result<f64> {
        let mut sum = 0.0;
        for layer in &self.layers {
            sum += crate::rational::to_f64(&layer.weight) * layer.form.evaluate(z)?;
        }
        Ok(sum)
    }
}

/// A form with its terms converted to `Complex64`, for fast repeated
/// evaluation and gradients.
#[derive(Clone, Debug)]
pub struct CompiledForm {
    n: usize,
    m: u32,
    terms: Vec<(Vec<u32>, Vec<u32>, Complex64)>,
    abs_sum: f64,
}

impl CompiledForm {
    pub fn new(form: &HermitianForm) -> Self {
        let terms: Vec<_> = form
            .terms()
            .map(|(a, b, c)| (a.exponents().to_vec(), b.exponents().to_vec(), to_c64(c)))
            .collect();
        let abs_sum = terms.iter().map(|t| t.2.norm()).sum();
        CompiledForm {
            n: form.n(),
            m: form.m(),
            terms,
            abs_sum,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    /// Lipschitz constant `2m Σ|c_{αβ}|` on the closed unit ball.
    pub fn lipschitz(&self) -> f64 {
        2.0 * self.m as f64 * self.abs_sum
    }

    fn powers(&self, z: &[Complex64]) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
        let m = self.m as usize;
        let mut pz = Vec::with_capacity(self.n);
        let mut pzb = Vec::with_capacity(self.n);
        for &zi in z {
            let mut row = Vec::with_capacity(m + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            for _ in 0..=m {
                row.push(acc);
                acc *= zi;
            }
            pzb.push(row.iter().map(|w| w.conj()).collect());
            pz.push(row);
        }
        (pz, pzb)
    }

    /// Raw complex sum `Σ c z^α z̄^β`.
    pub fn raw_value(&self, z: &[Complex64]) -> Complex64 {
        let (pz, pzb) = self.powers(z);
        let mut sum = Complex64::new(0.0, 0.0);
        for (a, b, c) in &self.terms {
            let mut t = *c;
            for i in 0..self.n {
                t *= pz[i][a[i] as usize] * pzb[i][b[i] as usize];
            }
            sum += t;
        }
        sum
    }

    /// Real part of the raw sum, without the reality check.
    pub fn value_unchecked(&self, z: &[Complex64]) -> f64 {
        self.raw_value(z).re
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Result<f64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let v = self.raw_value(z);
        let norm2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let tol = 1e-12 * self.abs_sum * norm2.powi(self.m as i32);
        if v.im.abs() > tol && v.im.abs() > f64::MIN_POSITIVE {
            return Err(Error::NonRealValue { imag: v.im, tol });
        }
        Ok(v.re)
    }

    /// Value and `g_i = ∂f/∂z̄_i`. The real gradient of `f` on `R^{2n}`
    /// is `2g` in complex notation.
    pub fn value_and_dzbar(&self, z: &[Complex64]) -> (f64, Vec<Complex64>) {
        let (pz, pzb) = self.powers(z);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut grad = vec![Complex64::new(0.0, 0.0); self.n];
        for (a, b, c) in &self.terms {
            let mut factors = Vec::with_capacity(self.n);
            let mut t = *c;
            for i in 0..self.n {
                let zf = pz[i][a[i] as usize];
                let zbf = pzb[i][b[i] as usize];
                factors.push(zf);
                t *= zf * zbf;
            }
            sum += t;
            for i in 0..self.n {
                let bi = b[i] as usize;
                if bi == 0 {
                    continue;
                }
                let mut d = *c * bi as f64 * pzb[i][bi - 1] * factors[i];
                for k in 0..self.n {
                    if k != i {
                        d *= factors[k] * pzb[k][b[k] as usize];
                    }
                }
                grad[i] += d;
            }
        }
        (sum.re, grad)
    }
}

#[cfg(test)]
mod tests;
