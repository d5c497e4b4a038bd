//! Published sufficient shift degrees `N` and their comparison with the
//! smallest `N` found by direct PSD search.
//!
//! All logarithms are natural. A bound written as `N ≥ x` is rounded with
//! `ceil`, one written as `N > x` returns the smallest integer strictly above
//! `x`; both are floored at zero.

use num_bigint::BigUint;
use num_traits::FromPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{lambda_min, lambda_sharp, HermitianForm, SphereExtremum, SphereOptions};
use crate::multiindex::dim_homogeneous_usize;
use crate::multiplier::{is_psd, minimal_sos_n, multiplier_matrix, MultiplierOptions, PsdMode};
use crate::rational::to_f64;

/// Relative slack used when deciding whether a floating right-hand side
/// sits exactly on an integer.
const SNAP: f64 = 1e-9;

/// Largest argument accepted by `exp` before reporting overflow.
const EXP_LIMIT: f64 = 700.0;

fn positive_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveLambda { lambda })
    }
}

fn ceil_floored(x: f64) -> u64 {
    if x <= 0.0 {
        0
    } else {
        x.ceil() as u64
    }
}

/// Smallest integer `N ≥ 0` with `N > x`; values within `SNAP` of an integer
/// count as that integer.
fn strictly_above(x: f64) -> u64 {
    let snapped = (x + SNAP * x.abs().max(1.0)).floor();
    if snapped < 0.0 {
        0
    } else {
        snapped as u64 + 1
    }
}

/// `C (Λ/λ) (m+n)^3 log^3 n`, before rounding.
pub fn certified_n_rhs(n: usize, m: u32, c: f64, lambda: f64, big_lambda: f64) -> Result<f64> {
    positive_lambda(lambda)?;
    if n < 2 {
        return Err(Error::InvalidArgument("the bound needs n >= 2".into()));
    }
    let ln_n = (n as f64).ln();
    Ok(c * (big_lambda / lambda) * ((m as usize + n) as f64).powi(3) * ln_n.powi(3))
}

pub fn certified_n(n: usize, m: u32, c: f64, lambda: f64, big_lambda: f64) -> Result<u64> {
    certified_n_rhs(n, m, c, lambda, big_lambda).map(ceil_floored)
}

/// Diagonal-case bound `N > (m(m-1)/2)(Λ̃/λ) - m`.
pub fn powers_resnick_n(m: u32, lambda_tilde: f64, lambda: f64) -> Result<u64> {
    positive_lambda(lambda)?;
    let m = m as f64;
    Ok(strictly_above(m * (m - 1.0) / 2.0 * lambda_tilde / lambda - m))
}

/// Form-level wrapper that refuses non-diagonal forms.
pub fn powers_resnick_n_for(form: &HermitianForm, lambda: f64) -> Result<u64> {
    let tilde = form.lambda_tilde();
    if tilde.off_diagonal {
        return Err(Error::NotDiagonal);
    }
    powers_resnick_n(form.m(), to_f64(&tilde.value), lambda)
}

/// `N ≥ n m (2m-1) Λ♯ / (log 2 · λ) - n - m`.
pub fn to_yeung_n(n: usize, m: u32, lambda_sharp: f64, lambda: f64) -> Result<u64> {
    positive_lambda(lambda)?;
    let (nf, mf) = (n as f64, m as f64);
    Ok(ceil_floored(
        nf * mf * (2.0 * mf - 1.0) * lambda_sharp / (std::f64::consts::LN_2 * lambda) - nf - mf,
    ))
}

/// `c · exp(m^2 n^m Λ̃/λ)^c`, the right-hand side of the bound, or
/// `Overflow` when it leaves double range.
pub fn nie_schweighofer_rhs(n: usize, m: u32, lambda_tilde: f64, lambda: f64, c: f64) -> Result<f64> {
    positive_lambda(lambda)?;
    if c <= 0.0 {
        return Err(Error::InvalidArgument("c must be positive".into()));
    }
    let x = (m as f64).powi(2) * (n as f64).powi(m as i32) * lambda_tilde / lambda;
    let exponent = c * x + c.ln();
    if x > EXP_LIMIT || exponent > EXP_LIMIT {
        return Err(Error::Overflow);
    }
    Ok(exponent.exp())
}

/// Smallest integer strictly above [`nie_schweighofer_rhs`].
pub fn nie_schweighofer_n(n: usize, m: u32, lambda_tilde: f64, lambda: f64, c: f64) -> Result<BigUint> {
    let rhs = nie_schweighofer_rhs(n, m, lambda_tilde, lambda, c)?;
    let floor = BigUint::from_f64(rhs.floor()).ok_or(Error::Overflow)?;
    Ok(floor + 1u32)
}

/// A report field that may be unavailable for a given form.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field<T> {
    Value(T),
    Unavailable(String),
}

impl<T> Field<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Field::Value(v) => Some(v),
            Field::Unavailable(_) => None,
        }
    }

    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => Field::Value(v),
            Err(e) => Field::Unavailable(e.to_string()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundOptions {
    /// The unspecified universal constant of the certified bound.
    pub universal_c: f64,
    /// Constant `c` of the Nie–Schweighofer bound.
    pub nie_schweighofer_c: f64,
    pub n_max: u32,
    pub sphere: SphereOptions,
    pub multiplier: MultiplierOptions,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            universal_c: 1.0,
            nie_schweighofer_c: 1.0,
            n_max: 30,
            sphere: SphereOptions::default(),
            multiplier: MultiplierOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub m: u32,
    pub diagonal: bool,
    pub lambda: SphereExtremum,
    pub big_lambda: f64,
    pub lambda_tilde: f64,
    pub lambda_sharp: SphereExtremum,
    pub universal_c_used: f64,
    pub certified_n: Field<u64>,
    pub powers_resnick_n: Field<u64>,
    pub to_yeung_n: Field<u64>,
    /// Decimal string; the value can exceed 64 bits.
    pub nie_schweighofer_n: Field<String>,
    pub empirical_minimal_n: Field<u32>,
    /// Smallest `C` on a 1/64 grid whose certified `N` is PSD-sufficient.
    pub smallest_sufficient_c: Field<f64>,
    /// Cross-bound consistency failures; empty when everything agrees.
    pub violations: Vec<String>,
}

/// Treats a computed sphere minimum within optimizer tolerance of zero as
/// zero.
pub fn effective_lambda(form: &HermitianForm, lambda: &SphereExtremum, tolerance: f64) -> f64 {
    if lambda.value <= tolerance * form.coefficient_abs_sum() {
        lambda.value.min(0.0)
    } else {
        lambda.value
    }
}

pub fn bound_report(form: &HermitianForm, opts: &BoundOptions) -> Result<BoundReport> {
    if let Err(mut problems) = form.validate() {
        return Err(problems.remove(0));
    }
    let (n, m) = (form.n(), form.m());
    let exec = opts.sphere.execution;
    let (spheres, empirical) = exec.join(
        || -> Result<_> { Ok((lambda_min(form, &opts.sphere)?, lambda_sharp(form, &opts.sphere)?)) },
        || minimal_sos_n(form, opts.n_max, &opts.multiplier),
    );
    let (lam, sharp) = spheres?;
    let lambda = effective_lambda(form, &lam, opts.sphere.tolerance);
    let big_lambda = form.big_lambda();
    let tilde = form.lambda_tilde();
    let lambda_tilde = to_f64(&tilde.value);

    let certified = Field::from_result(certified_n(n, m, opts.universal_c, lambda, big_lambda));
    let pr = Field::from_result(if tilde.off_diagonal {
        Err(Error::NotDiagonal)
    } else {
        powers_resnick_n(m, lambda_tilde, lambda)
    });
    let ty = Field::from_result(to_yeung_n(n, m, sharp.value, lambda));
    let ns = Field::from_result(
        nie_schweighofer_n(n, m, lambda_tilde, lambda, opts.nie_schweighofer_c).map(|v| v.to_string()),
    );
    let empirical = Field::from_result(empirical);
    let smallest_c = match (empirical.value(), lambda > 0.0) {
        (Some(&emp), true) => Field::from_result(smallest_sufficient_c(form, emp, lambda, big_lambda, opts)),
        (None, _) => Field::Unavailable("no empirical minimum".into()),
        (_, false) => Field::Unavailable(Error::NonPositiveLambda { lambda }.to_string()),
    };

    let mut violations = Vec::new();
    if lambda > 0.0 {
        let slack = 1e-9 * form.coefficient_abs_sum();
        if lambda > sharp.value + slack {
            violations.push(format!("lambda {lambda} exceeds sharp norm {}", sharp.value));
        }
        if sharp.value > big_lambda + slack {
            violations.push(format!("sharp norm {} exceeds Lambda {big_lambda}", sharp.value));
        }
    }
    if let Some(&emp) = empirical.value() {
        for (name, bound) in [("powers_resnick", &pr), ("to_yeung", &ty)] {
            if let Some(&b) = bound.value() {
                if (emp as u64) > b {
                    violations.push(format!("empirical N {emp} exceeds {name} bound {b}"));
                }
            }
        }
    }

    Ok(BoundReport {
        n,
        m,
        diagonal: !tilde.off_diagonal,
        lambda: lam,
        big_lambda,
        lambda_tilde,
        lambda_sharp: sharp,
        universal_c_used: opts.universal_c,
        certified_n: certified,
        powers_resnick_n: pr,
        to_yeung_n: ty,
        nie_schweighofer_n: ns,
        empirical_minimal_n: empirical,
        smallest_sufficient_c: smallest_c,
        violations,
    })
}

/// Binary search over `C = k/64` for the smallest constant whose certified
/// `N` is PSD. PSD is monotone in `N`, so `N(C) ≥ N_min` decides; the final
/// `N` is re-checked directly when it fits under the size cap.
fn smallest_sufficient_c(
    form: &HermitianForm,
    empirical: u32,
    lambda: f64,
    big_lambda: f64,
    opts: &BoundOptions,
) -> Result<f64> {
    let (n, m) = (form.n(), form.m());
    let sufficient = |k: u64| -> Result<bool> {
        Ok(certified_n(n, m, k as f64 / 64.0, lambda, big_lambda)? >= empirical as u64)
    };
    let mut hi = 1u64;
    while !sufficient(hi)? {
        hi *= 2;
        if hi > 1 << 40 {
            return Err(Error::Overflow);
        }
    }
    let mut lo = 0u64;
    if sufficient(lo)? {
        hi = 0;
    }
    while hi > lo + 1 {
        let mid = (lo + hi) / 2;
        if sufficient(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c = hi as f64 / 64.0;
    let shift = certified_n(n, m, c, lambda, big_lambda)?;
    if let Ok(shift) = u32::try_from(shift) {
        if dim_homogeneous_usize(n, m + shift) <= opts.multiplier.size_cap.min(2_000) {
            let matrix = multiplier_matrix(form, shift, &opts.multiplier)?;
            if !is_psd(&matrix, PsdMode::Exact)?.psd {
                return Err(Error::NotPsd { shift });
            }
        }
    }
    Ok(c)
}
