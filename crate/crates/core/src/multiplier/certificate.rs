//! Weighted sum-of-squares certificates `⟨z, z̄⟩^N f = Σ_j w_j |Q_j(z)|^2`.
//!
//! Exact certificates keep rational weights `w_j > 0` next to rational
//! coefficient vectors, so no square roots are needed. Floating
//! certificates come from an eigendecomposition.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::psd::{hermitian_block, ldl, LdlOutcome};
use super::{multiplier_matrix, MultiplierMatrix, MultiplierOptions};
use crate::error::{Error, Result};
use crate::forms::HermitianForm;
use crate::multiindex::{factorial, MultiIndex};
use crate::rational::{from_biguint, to_c64, to_f64, CRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateMode {
    Exact,
    Floating,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Square {
    Exact {
        weight: BigRational,
        /// `(basis index, coefficient)`, zero entries omitted.
        coefficients: Vec<(usize, CRational)>,
    },
    Float {
        weight: f64,
        coefficients: Vec<(usize, Complex64)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verification {
    ExactPass,
    FloatPass { residual: f64 },
    Fail { residual: f64 },
    Unverified,
}

impl Verification {
    pub fn passed(&self) -> bool {
        matches!(self, Verification::ExactPass | Verification::FloatPass { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SosCertificate {
    pub n: usize,
    pub m: u32,
    /// The shift degree `N`.
    pub shift: u32,
    pub mode: CertificateMode,
    /// Graded-lex basis of degree `m + N`.
    pub basis: Vec<MultiIndex>,
    pub squares: Vec<Square>,
    pub verification: Verification,
}

/// Factors the multiplier matrix at `shift` and verifies the result before
/// returning it.
pub fn sos_decompose(
    form: &HermitianForm,
    shift: u32,
    mode: CertificateMode,
    opts: &MultiplierOptions,
) -> Result<SosCertificate> {
    let matrix = multiplier_matrix(form, shift, opts)?;
    let scale = from_biguint(&factorial(shift));
    let squares = match mode {
        CertificateMode::Exact => match ldl(&matrix) {
            LdlOutcome::NotPsd { .. } => return Err(Error::NotPsd { shift }),
            LdlOutcome::Psd { factors, .. } => factors
                .into_iter()
                .map(|f| Square::Exact {
                    weight: f.pivot * &scale,
                    coefficients: f.column,
                })
                .collect(),
        },
        CertificateMode::Floating => floating_squares(&matrix, to_f64(&scale))?,
    };
    let mut cert = SosCertificate {
        n: form.n(),
        m: form.m(),
        shift,
        mode,
        basis: matrix.basis().to_vec(),
        squares,
        verification: Verification::Unverified,
    };
    cert.verification = verify_against(&matrix, &cert);
    match cert.verification {
        Verification::Fail { residual } => Err(Error::VerificationFailed { residual }),
        _ => Ok(cert),
    }
}

fn floating_squares(matrix: &MultiplierMatrix, scale: f64) -> Result<Vec<Square>> {
    let tol = 1e-9 * matrix.frobenius_norm();
    let mut squares = Vec::new();
    for block in matrix.blocks() {
        let eig = SymmetricEigen::new(hermitian_block(matrix, &block));
        for (idx, &val) in eig.eigenvalues.iter().enumerate() {
            if val < -100.0 * tol {
                return Err(Error::NotPsd {
                    shift: matrix.shift(),
                });
            }
            if val <= tol {
                continue;
            }
            // M = Σ λ v v*, so each term is λ |Σ v_r z^r|²
            let v = eig.eigenvectors.column(idx);
            let coefficients = block
                .iter()
                .enumerate()
                .map(|(r, &g)| (g, v[r]))
                .filter(|(_, c)| c.norm() > 0.0)
                .collect();
            squares.push(Square::Float {
                weight: val * scale,
                coefficients,
            });
        }
    }
    Ok(squares)
}

/// Re-expands `Σ w_j Q_j conj(Q_j)` and compares it with the coefficients
/// of `⟨z, z̄⟩^N f`, recomputed from the form.
pub fn verify_certificate(
    form: &HermitianForm,
    cert: &SosCertificate,
    opts: &MultiplierOptions,
) -> Verification {
    if form.n() != cert.n || form.m() != cert.m {
        return Verification::Fail {
            residual: f64::INFINITY,
        };
    }
    match multiplier_matrix(form, cert.shift, opts) {
        Ok(matrix) => verify_against(&matrix, cert),
        Err(_) => Verification::Fail {
            residual: f64::INFINITY,
        },
    }
}

fn verify_against(matrix: &MultiplierMatrix, cert: &SosCertificate) -> Verification {
    let dim = matrix.dim();
    if cert.basis.as_slice() != matrix.basis() || cert.squares.len() > dim {
        return Verification::Fail {
            residual: f64::INFINITY,
        };
    }
    let target = matrix.scaled(&from_biguint(&factorial(cert.shift)));
    match cert.mode {
        CertificateMode::Exact => {
            let mut expanded: BTreeMap<(usize, usize), CRational> = BTreeMap::new();
            for sq in &cert.squares {
                let Square::Exact {
                    weight,
                    coefficients,
                } = sq
                else {
                    return Verification::Fail {
                        residual: f64::INFINITY,
                    };
                };
                if !weight.is_positive() || coefficients.iter().any(|(i, _)| *i >= dim) {
                    return Verification::Fail {
                        residual: f64::INFINITY,
                    };
                }
                for (i, qi) in coefficients {
                    let wq = CRational::new(&qi.re * weight, &qi.im * weight);
                    for (j, qj) in coefficients {
                        *expanded.entry((*i, *j)).or_insert_with(CRational::zero) += &wq * qj.conj();
                    }
                }
            }
            let mut mismatch = false;
            let mut residual = 0.0f64;
            let keys: std::collections::BTreeSet<(usize, usize)> =
                expanded.keys().chain(target.entries().keys()).copied().collect();
            for key in keys {
                let lhs = expanded.get(&key).cloned().unwrap_or_else(CRational::zero);
                let rhs = target.get(key.0, key.1);
                if lhs != rhs {
                    mismatch = true;
                    residual = residual.max(to_c64(&(lhs - rhs)).norm());
                }
            }
            if mismatch {
                Verification::Fail {
                    residual: residual.max(f64::MIN_POSITIVE),
                }
            } else {
                Verification::ExactPass
            }
        }
        CertificateMode::Floating => {
            let mut expanded: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
            for sq in &cert.squares {
                let (weight, coefficients): (f64, Vec<(usize, Complex64)>) = match sq {
                    Square::Float {
                        weight,
                        coefficients,
                    } => (*weight, coefficients.clone()),
                    Square::Exact {
                        weight,
                        coefficients,
                    } => (
                        to_f64(weight),
                        coefficients.iter().map(|(i, c)| (*i, to_c64(c))).collect(),
                    ),
                };
                if coefficients.iter().any(|(i, _)| *i >= dim) {
                    return Verification::Fail {
                        residual: f64::INFINITY,
                    };
                }
                for (i, qi) in &coefficients {
                    for (j, qj) in &coefficients {
                        *expanded.entry((*i, *j)).or_default() += weight * qi * qj.conj();
                    }
                }
            }
            let mut residual = 0.0f64;
            for (&(i, j), v) in &expanded {
                residual = residual.max((v - to_c64(&target.get(i, j))).norm());
            }
            for (&key, v) in target.entries() {
                if !expanded.contains_key(&key) {
                    residual = residual.max(to_c64(v).norm());
                }
            }
            let threshold = 1e-8 * target.max_abs();
            if residual <= threshold {
                Verification::FloatPass { residual }
            } else {
                Verification::Fail { residual }
            }
        }
    }
}
