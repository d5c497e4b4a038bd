//! Positive-semidefiniteness of hermitian multiplier matrices.
//!
//! Exact mode runs a pivoted `L D L*` elimination over the complex
//! rationals, block by block. Floating mode takes the smallest eigenvalue of
//! the real symmetric embedding `[[Re, -Im], [Im, Re]]`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::MultiplierMatrix;
use crate::error::{Error, Result};
use crate::rational::{to_c64, CRational};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PsdMode {
    Exact,
    /// PSD iff `λ_min ≥ -tolerance · ‖M‖_F`; not PSD below
    /// `-100 · tolerance · ‖M‖_F`; indeterminate in between.
    Floating { tolerance: f64 },
}

impl PsdMode {
    pub fn floating() -> Self {
        PsdMode::Floating { tolerance: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Exact(Vec<CRational>),
    Float(Vec<Complex64>),
}

#[derive(Clone, Debug)]
pub struct PsdReport {
    pub psd: bool,
    /// Vector `v` with `⟨Mv, v⟩ < 0` when not PSD.
    pub witness: Option<Witness>,
    /// Nonzero pivots (exact) or eigenvalues above tolerance (floating).
    pub rank: usize,
    pub zero_pivots: usize,
    /// Floating mode only.
    pub min_eigenvalue: Option<f64>,
}

/// One nonzero step of the elimination: `M = Σ pivot · ℓ ℓ*` over all steps.
#[derive(Clone, Debug)]
pub(crate) struct LdlFactor {
    pub pivot: BigRational,
    /// Global basis indices and entries of `ℓ`, with `ℓ[pivot_index] = 1`.
    pub column: Vec<(usize, CRational)>,
}

pub(crate) enum LdlOutcome {
    Psd {
        factors: Vec<LdlFactor>,
        zero_pivots: usize,
    },
    NotPsd {
        witness: Vec<CRational>,
    },
}

pub fn is_psd(matrix: &MultiplierMatrix, mode: PsdMode) -> Result<PsdReport> {
    match mode {
        PsdMode::Exact => Ok(match ldl(matrix) {
            LdlOutcome::Psd {
                factors,
                zero_pivots,
            } => PsdReport {
                psd: true,
                witness: None,
                rank: factors.len(),
                zero_pivots,
                min_eigenvalue: None,
            },
            LdlOutcome::NotPsd { witness } => PsdReport {
                psd: false,
                witness: Some(Witness::Exact(witness)),
                rank: 0,
                zero_pivots: 0,
                min_eigenvalue: None,
            },
        }),
        PsdMode::Floating { tolerance } => floating(matrix, tolerance),
    }
}

/// Pivoted hermitian elimination on each coupled block.
pub(crate) fn ldl(matrix: &MultiplierMatrix) -> LdlOutcome {
    let mut factors = Vec::new();
    let mut zero_pivots = 0;
    for block in matrix.blocks() {
        match ldl_block(matrix, &block) {
            BlockOutcome::Psd { factors: f, zero_pivots: z } => {
                factors.extend(f);
                zero_pivots += z;
            }
            BlockOutcome::NotPsd { local } => {
                let mut witness = vec![CRational::zero(); matrix.dim()];
                for (k, &g) in block.iter().enumerate() {
                    witness[g] = local[k].clone();
                }
                debug_assert!(matrix.quadratic_form(&witness).re.is_negative());
                return LdlOutcome::NotPsd { witness };
            }
        }
    }
    LdlOutcome::Psd {
        factors,
        zero_pivots,
    }
}

enum BlockOutcome {
    Psd {
        factors: Vec<LdlFactor>,
        zero_pivots: usize,
    },
    NotPsd {
        local: Vec<CRational>,
    },
}

/// Pivot position, pivot value and the eliminated column.
type Step = (usize, BigRational, Vec<(usize, CRational)>);

fn ldl_block(matrix: &MultiplierMatrix, block: &[usize]) -> BlockOutcome {
    let k = block.len();
    let mut s: Vec<Vec<CRational>> = block
        .iter()
        .map(|&i| block.iter().map(|&j| matrix.get(i, j)).collect())
        .collect();
    let mut active: Vec<usize> = (0..k).collect();
    // (pivot position, pivot value, local column over active indices)
    let mut steps: Vec<Step> = Vec::new();

    loop {
        if active.is_empty() {
            break;
        }
        if let Some(&neg) = active.iter().find(|&&i| s[i][i].re.is_negative()) {
            let mut x = vec![CRational::zero(); k];
            x[neg] = CRational::new(BigRational::from_integer(1.into()), BigRational::zero());
            return BlockOutcome::NotPsd {
                local: back_substitute(x, &steps),
            };
        }
        let p = *active
            .iter()
            .max_by(|&&a, &&b| s[a][a].re.abs().cmp(&s[b][b].re.abs()).then(b.cmp(&a)))
            .expect("nonempty");
        let pivot = s[p][p].re.clone();
        if pivot.is_zero() {
            // all remaining diagonals vanish; the rest must be identically zero
            for &i in &active {
                for &j in &active {
                    if i != j && !s[i][j].is_zero() {
                        let mut x = vec![CRational::zero(); k];
                        x[i] = -s[i][j].clone();
                        x[j] = CRational::new(BigRational::from_integer(1.into()), BigRational::zero());
                        return BlockOutcome::NotPsd {
                            local: back_substitute(x, &steps),
                        };
                    }
                }
            }
            let zero_pivots = active.len();
            return BlockOutcome::Psd {
                factors: to_factors(block, steps),
                zero_pivots,
            };
        }

        active.retain(|&i| i != p);
        let column: Vec<(usize, CRational)> = active
            .iter()
            .filter(|&&j| !s[j][p].is_zero())
            .map(|&j| (j, CRational::new(&s[j][p].re / &pivot, &s[j][p].im / &pivot)))
            .collect();
        // Schur complement: S_jl -= ℓ_j · S_pl
        for (j, lj) in &column {
            for &l in &active {
                if s[p][l].is_zero() {
                    continue;
                }
                let delta = lj * &s[p][l];
                s[*j][l] -= delta;
            }
        }
        steps.push((p, pivot, column));
    }
    BlockOutcome::Psd {
        factors: to_factors(block, steps),
        zero_pivots: 0,
    }
}

/// Completes `x` (given on the still-active indices) so that `ℓ_k* x = 0`
/// for every elimination step; then `x* M x` equals the Schur-complement
/// value on the active part.
fn back_substitute(
    mut x: Vec<CRational>,
    steps: &[Step],
) -> Vec<CRational> {
    for (p, _, column) in steps.iter().rev() {
        let mut acc = CRational::zero();
        for (j, lj) in column {
            if !x[*j].is_zero() {
                acc += lj.conj() * &x[*j];
            }
        }
        x[*p] = -acc;
    }
    x
}

fn to_factors(
    block: &[usize],
    steps: Vec<Step>,
) -> Vec<LdlFactor> {
    steps
        .into_iter()
        .map(|(p, pivot, column)| {
            let mut col: Vec<(usize, CRational)> = Vec::with_capacity(column.len() + 1);
            col.push((
                block[p],
                CRational::new(BigRational::from_integer(1.into()), BigRational::zero()),
            ));
            col.extend(column.into_iter().map(|(j, v)| (block[j], v)));
            col.sort_by_key(|(i, _)| *i);
            LdlFactor { pivot, column: col }
        })
        .collect()
}

/// Dense copy of a hermitian block.
pub(crate) fn hermitian_block(matrix: &MultiplierMatrix, block: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(block.len(), block.len(), |r, c| to_c64(&matrix.get(block[r], block[c])))
}

fn floating(matrix: &MultiplierMatrix, tolerance: f64) -> Result<PsdReport> {
    let scale = matrix.frobenius_norm();
    let mut min_eig = f64::INFINITY;
    let mut witness = Vec::new();
    let mut rank = 0;
    for block in matrix.blocks() {
        let eig = SymmetricEigen::new(hermitian_block(matrix, &block));
        rank += eig.eigenvalues.iter().filter(|&&e| e > tolerance * scale).count();
        let (idx, &val) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty block");
        if val < min_eig {
            min_eig = val;
            let v = eig.eigenvectors.column(idx);
            witness = vec![Complex64::new(0.0, 0.0); matrix.dim()];
            for (r, &g) in block.iter().enumerate() {
                witness[g] = v[r];
            }
        }
    }
    if matrix.dim() == 0 || min_eig >= -tolerance * scale {
        return Ok(PsdReport {
            psd: true,
            witness: None,
            rank,
            zero_pivots: matrix.dim() - rank,
            min_eigenvalue: Some(min_eig.min(f64::MAX)),
        });
    }
    if min_eig >= -100.0 * tolerance * scale {
        return Err(Error::NumericalIndeterminate {
            min_eigenvalue: min_eig,
        });
    }
    Ok(PsdReport {
        psd: false,
        witness: Some(Witness::Float(witness)),
        rank,
        zero_pivots: 0,
        min_eigenvalue: Some(min_eig),
    })
}
