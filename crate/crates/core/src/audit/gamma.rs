//! Regularized incomplete gamma functions `P(a, x)` and `Q(a, x)`.
//!
//! Series for `x < a + 1`, modified Lentz continued fraction otherwise. The
//! prefactor `x^a e^{-x} / Γ(a)` is formed in the log domain.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const EPS: f64 = 1e-15;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 1_000_000;

/// Returns `(P(a, x), Q(a, x))`.
pub fn regularized_gamma(a: f64, x: f64) -> Result<(f64, f64)> {
    if a.is_nan() || a <= 0.0 || x < 0.0 || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "incomplete gamma needs a > 0, x >= 0 (a = {a}, x = {x})"
        )));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let p = series(a, x, log_prefix)?;
        Ok((p, 1.0 - p))
    } else {
        let q = continued_fraction(a, x, log_prefix)?;
        Ok((1.0 - q, q))
    }
}

pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    regularized_gamma(a, x).map(|r| r.0)
}

pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    regularized_gamma(a, x).map(|r| r.1)
}

fn series(a: f64, x: f64, log_prefix: f64) -> Result<f64> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok((sum.ln() + log_prefix).exp().min(1.0));
        }
    }
    Err(Error::SpecialFunctionNonConvergence(format!(
        "gamma series at a = {a}, x = {x}"
    )))
}

fn continued_fraction(a: f64, x: f64, log_prefix: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok((h.ln() + log_prefix).exp().min(1.0));
        }
    }
    Err(Error::SpecialFunctionNonConvergence(format!(
        "gamma continued fraction at a = {a}, x = {x}"
    )))
}
