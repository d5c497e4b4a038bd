//! The multiplier matrix of `⟨z, z̄⟩^N f`, its PSD decision, and SOS
//! certificates.
//!
//! `c^N_{ργ} = Σ_{α+μ=ρ, β+μ=γ, |μ|=N} c_{αβ} / μ!` is the coefficient matrix
//! of `⟨z, z̄⟩^N f / N!` over the degree `m + N` monomials. The `1/N!`
//! normalization does not affect positivity; certificates carry the `N!`
//! in their weights so that they expand to `⟨z, z̄⟩^N f` itself.

mod certificate;
mod psd;

pub use certificate::{
    sos_decompose, verify_certificate, CertificateMode, SosCertificate, Square, Verification,
};
pub use psd::{is_psd, PsdMode, PsdReport, Witness};

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::forms::HermitianForm;
use crate::multiindex::{dim_homogeneous_usize, enumerate_degree, MultiIndex};
use crate::rational::{recip_biguint, to_c64, CRational};

pub const DEFAULT_SIZE_CAP: usize = 20_000;

#[derive(Clone, Copy, Debug)]
pub struct MultiplierOptions {
    /// Largest admissible basis dimension.
    pub size_cap: usize,
    pub execution: Execution,
}

impl Default for MultiplierOptions {
    fn default() -> Self {
        MultiplierOptions {
            size_cap: DEFAULT_SIZE_CAP,
            execution: Execution::default(),
        }
    }
}

/// Hermitian matrix `(c^N_{ργ})` over the graded-lex basis of degree `m+N`.
/// Only nonzero entries are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierMatrix {
    n: usize,
    m: u32,
    shift: u32,
    basis: Vec<MultiIndex>,
    entries: BTreeMap<(usize, usize), CRational>,
}

impl MultiplierMatrix {
    /// Assembles a matrix from explicit entries; used for tests and for
    /// re-expanding certificates.
    pub fn from_entries(
        n: usize,
        m: u32,
        shift: u32,
        entries: BTreeMap<(usize, usize), CRational>,
    ) -> Self {
        let basis = enumerate_degree(n, m + shift);
        let entries = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        MultiplierMatrix {
            n,
            m,
            shift,
            basis,
            entries,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// The shift degree `N`.
    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn get(&self, row: usize, col: usize) -> CRational {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(CRational::zero)
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), CRational> {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.entries
            .iter()
            .all(|(&(i, j), v)| self.entries.get(&(j, i)).is_some_and(|w| *w == v.conj()))
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|(i, j)| i == j)
    }

    /// Entry-wise product with a rational scalar.
    pub fn scaled(&self, t: &BigRational) -> MultiplierMatrix {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| (*k, CRational::new(&v.re * t, &v.im * t)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        MultiplierMatrix {
            entries,
            basis: self.basis.clone(),
            ..*self
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .values()
            .map(|v| to_c64(v).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| to_c64(v).norm()).fold(0.0, f64::max)
    }

    /// Exact quadratic form `v* M v`.
    pub fn quadratic_form(&self, v: &[CRational]) -> CRational {
        let mut acc = CRational::zero();
        for (&(i, j), c) in &self.entries {
            if v[i].is_zero() || v[j].is_zero() {
                continue;
            }
            acc += v[i].conj() * c * &v[j];
        }
        acc
    }

    pub fn quadratic_form_f64(&self, v: &[Complex64]) -> f64 {
        self.entries
            .iter()
            .map(|(&(i, j), c)| (v[i].conj() * to_c64(c) * v[j]).re)
            .sum()
    }

    /// Index groups that the matrix couples; it is block diagonal over them.
    /// Groups are sorted and listed in order of their smallest index.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let d = self.dim();
        let mut parent: Vec<usize> = (0..d).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(i, j) in self.entries.keys() {
            if i != j {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..d {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }
}

/// Builds `(c^N_{ργ})` by looping over the nonzero `c_{αβ}` and all `μ` of
/// degree `N`.
pub fn multiplier_matrix(
    form: &HermitianForm,
    shift: u32,
    opts: &MultiplierOptions,
) -> Result<MultiplierMatrix> {
    if let Err(mut problems) = form.validate() {
        return Err(problems.remove(0));
    }
    let (n, m) = (form.n(), form.m());
    let dim = dim_homogeneous_usize(n, m + shift);
    if dim > opts.size_cap {
        return Err(Error::SizeCapExceeded {
            dim,
            cap: opts.size_cap,
        });
    }
    let shifts: Vec<(MultiIndex, BigRational)> = enumerate_degree(n, shift)
        .into_iter()
        .map(|mu| {
            let w = recip_biguint(&mu.factorial());
            (mu, w)
        })
        .collect();
    let terms: Vec<(&MultiIndex, &MultiIndex, &CRational)> = form.terms().collect();

    let partials = opts.execution.map(&terms, |&(alpha, beta, c)| {
        shifts
            .iter()
            .map(|(mu, w)| {
                let rho = alpha.add(mu).rank();
                let gamma = beta.add(mu).rank();
                ((rho, gamma), CRational::new(&c.re * w, &c.im * w))
            })
            .collect::<Vec<_>>()
    });

    let mut entries: BTreeMap<(usize, usize), CRational> = BTreeMap::new();
    for part in partials {
        for (key, v) in part {
            *entries.entry(key).or_insert_with(CRational::zero) += v;
        }
    }
    entries.retain(|_, v| !v.is_zero());
    Ok(MultiplierMatrix {
        n,
        m,
        shift,
        basis: enumerate_degree(n, m + shift),
        entries,
    })
}

/// Smallest `N ≤ n_max` whose multiplier matrix is PSD (exact decision).
/// PSD at `N` implies PSD at `N + 1`, so the first hit is the minimum.
pub fn minimal_sos_n(form: &HermitianForm, n_max: u32, opts: &MultiplierOptions) -> Result<u32> {
    for shift in 0..=n_max {
        let matrix = multiplier_matrix(form, shift, opts)?;
        if is_psd(&matrix, PsdMode::Exact)?.psd {
            return Ok(shift);
        }
    }
    Err(Error::NotFound { n_max })
}

#[cfg(test)]
mod tests;
