//! Numerical checks of the analytic estimates behind the degree bound:
//! Laplacian powers, the radial integral `I₁`, the tail integrals `J^±`,
//! the localization quantity `E_ε`, the σ-window and the basic inequality.
//!
//! Constant-free inequalities are asserted. Estimates that only hold up to
//! an unspecified constant are reported as ratios.

pub mod gamma;
pub mod quadrature;

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::forms::{lambda_min, unit_sphere_samples, HermitianForm, SphereOptions};
use crate::multiindex::enumerate_degree;
use crate::rational::{from_f64, rat_int, to_f64};
use quadrature::integrate;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub check: String,
    pub parameters: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; zero when both vanish.
    pub ratio: f64,
    pub pass: bool,
    pub notes: String,
}

impl AuditReport {
    fn new(check: &str, parameters: &[(&str, f64)], lhs: f64, rhs: f64, pass: bool) -> Self {
        let ratio = if lhs == 0.0 && rhs == 0.0 {
            0.0
        } else {
            lhs / rhs
        };
        AuditReport {
            check: check.to_string(),
            parameters: parameters
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            lhs,
            rhs,
            ratio,
            pass,
            notes: String::new(),
        }
    }

    fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }
}

/// Parameters of the localization regime. `sigma = h (M + m + n - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeParams {
    pub h: f64,
    /// Shift degree `N`.
    pub shift: u32,
    /// Polynomial degree `M = m + N`.
    pub degree: u32,
    pub m: u32,
    pub n: usize,
    pub epsilon: f64,
    pub sigma: f64,
}

impl RegimeParams {
    pub fn new(h: f64, degree: u32, m: u32, n: usize, epsilon: f64) -> Self {
        RegimeParams {
            h,
            shift: degree.saturating_sub(m),
            degree,
            m,
            n,
            epsilon,
            sigma: h * (degree + m + n as u32 - 1) as f64,
        }
    }

    /// `h = 1/N`, `M = m + N`, `ε = min(h^{1/3}, 1)`.
    pub fn standard(shift: u32, m: u32, n: usize) -> Self {
        let h = 1.0 / shift as f64;
        Self::new(h, m + shift, m, n, h.cbrt().min(1.0))
    }

    /// `ε = min(h^{1/3}, 1)` with `N = ceil(1/h)`.
    pub fn from_h(h: f64, m: u32, n: usize) -> Self {
        let shift = (1.0 / h - 1e-9).ceil().max(1.0) as u32;
        Self::new(h, m + shift, m, n, h.cbrt().min(1.0))
    }

    /// `σ` for the weight exponent `k` in place of `m`.
    pub fn sigma_for(&self, k: u32) -> f64 {
        self.h * (self.degree + k + self.n as u32 - 1) as f64
    }

    fn pairs(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("h", self.h),
            ("N", self.shift as f64),
            ("M", self.degree as f64),
            ("m", self.m as f64),
            ("n", self.n as f64),
            ("epsilon", self.epsilon),
            ("sigma", self.sigma),
        ]
    }
}

/// Individual conditions of the σ-window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowCheck {
    pub sigma: f64,
    pub epsilon: f64,
    /// `1 < σ < 3/2`
    pub sigma_range: bool,
    /// `4(σ - 1) ≤ ε ≤ 1`
    pub epsilon_range: bool,
    /// `1 - ε/2 ≥ (1 - ε)/σ`
    pub lower_containment: bool,
    /// `1 + ε/2 ≤ (1 + ε)/σ`
    pub upper_containment: bool,
}

impl WindowCheck {
    pub fn new(sigma: f64, epsilon: f64) -> Self {
        WindowCheck {
            sigma,
            epsilon,
            sigma_range: sigma > 1.0 && sigma < 1.5,
            epsilon_range: epsilon <= 1.0 && epsilon >= 4.0 * (sigma - 1.0),
            lower_containment: 1.0 - epsilon / 2.0 >= (1.0 - epsilon) / sigma,
            upper_containment: 1.0 + epsilon / 2.0 <= (1.0 + epsilon) / sigma,
        }
    }

    pub fn pass(&self) -> bool {
        self.sigma_range && self.epsilon_range && self.lower_containment && self.upper_containment
    }

    pub fn to_report(&self) -> AuditReport {
        let mut failed = Vec::new();
        if !self.sigma_range {
            failed.push("1 < sigma < 3/2");
        }
        if !self.epsilon_range {
            failed.push("4(sigma-1) <= epsilon <= 1");
        }
        if !self.lower_containment {
            failed.push("1 - epsilon/2 >= (1 - epsilon)/sigma");
        }
        if !self.upper_containment {
            failed.push("1 + epsilon/2 <= (1 + epsilon)/sigma");
        }
        let notes = if failed.is_empty() {
            "all window conditions hold".to_string()
        } else {
            format!("failed: {}", failed.join("; "))
        };
        AuditReport::new(
            "sigma_window",
            &[("sigma", self.sigma), ("epsilon", self.epsilon)],
            4.0 * (self.sigma - 1.0),
            self.epsilon,
            self.pass(),
        )
        .with_notes(notes)
    }
}

pub fn check_sigma_window(params: &RegimeParams) -> AuditReport {
    let mut report = WindowCheck::new(params.sigma, params.epsilon).to_report();
    report.parameters.extend(params.pairs().into_iter().map(|(k, v)| (k.to_string(), v)));
    report
}

/// For `j = 0..=m`: sampled `max |(¼Δ)^j f|` on the unit sphere against
/// `(nm²)^j Λ(f)`, and for `j ≥ 1` the exact single-step inequality
/// `Λ((¼Δ)g)² ≤ n² k⁴ Λ(g)²` for `g = (¼Δ)^{j-1} f` of bidegree `k`.
pub fn check_laplacian_powers(
    form: &HermitianForm,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<AuditReport>> {
    if let Err(mut problems) = form.validate() {
        return Err(problems.remove(0));
    }
    let (n, m) = (form.n(), form.m());
    let points = unit_sphere_samples(n, samples, seed);
    let big_lambda = form.big_lambda();
    let mut layers = vec![form.clone()];
    for _ in 0..m {
        let next = layers.last().expect("nonempty").quarter_laplacian()?;
        layers.push(next);
    }

    let mut reports = Vec::new();
    for (j, g) in layers.iter().enumerate() {
        let cf = g.compile();
        let max = exec
            .map(&points, |z| cf.value_unchecked(z).abs())
            .into_iter()
            .fold(0.0, f64::max);
        let bound = ((n as f64) * (m as f64).powi(2)).powi(j as i32) * big_lambda;
        let params = [("j", j as f64), ("n", n as f64), ("m", m as f64), ("samples", samples as f64)];
        reports.push(
            AuditReport::new("laplacian_power_max", &params, max, bound, max <= bound * (1.0 + 1e-12))
                .with_notes("sampled max |(1/4 Laplacian)^j f| <= (n m^2)^j Lambda(f)"),
        );
        if j > 0 {
            let prev = &layers[j - 1];
            let k = prev.m() as i64;
            let lhs = g.big_lambda_sq();
            let rhs = rat_int((n as i64).pow(2) * k.pow(4)) * prev.big_lambda_sq();
            reports.push(
                AuditReport::new("laplacian_frobenius_step", &params, to_f64(&lhs), to_f64(&rhs), lhs <= rhs)
                    .with_notes("exact: Lambda(Dg)^2 <= n^2 k^4 Lambda(g)^2"),
            );
        }
    }
    Ok(reports)
}

/// Log of the radial integrand of `I₁` at radius `r`.
fn log_i1_integrand(r: f64, h: f64, degree: u32, n: usize) -> f64 {
    let (mf, nf) = (degree as f64, n as f64);
    // |S^{2n-1}| = 2π^n/(n-1)!, so the π^n cancels
    let log_const = 2f64.ln() - ln_gamma(nf) - ln_gamma(mf + 1.0) - (nf + mf) * h.ln();
    log_const + (2.0 * mf + 2.0 * nf - 1.0) * r.ln() - r * r / h
}

/// Integrates `exp(log_f)` over `[a, ∞)` (or `[a, b]`) after splitting at
/// `peak` and cutting off where the integrand drops below `1e-300`.
fn integrate_log<F: Fn(f64) -> f64>(log_f: F, a: f64, b: Option<f64>, peak: f64, scale: f64) -> Result<f64> {
    let cutoff = (1e-300f64).ln();
    let end = match b {
        Some(b) => b,
        None => {
            let mut t = peak.max(a) + scale;
            while log_f(t) > cutoff {
                t += scale;
            }
            t
        }
    };
    if end <= a {
        return Ok(0.0);
    }
    let f = |t: f64| if t <= 0.0 { 0.0 } else { log_f(t).exp() };
    let mut cuts = vec![a];
    for p in [peak - 2.0 * scale, peak, peak + 2.0 * scale] {
        if p > a && p < end {
            cuts.push(p);
        }
    }
    cuts.push(end);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(f, w[0], w[1])?.value;
    }
    Ok(total)
}

/// `I₁ = |S^{2n-1}|/(M! π^n h^{n+M}) ∫_0^∞ r^{2M+2n-1} e^{-r²/h} dr` by
/// quadrature, against `(M+n-1)!/(M!(n-1)!)`.
pub fn radial_i1(h: f64, degree: u32, n: usize) -> Result<AuditReport> {
    if h.is_nan() || h <= 0.0 || n == 0 {
        return Err(Error::InvalidArgument("radial integral needs h > 0, n >= 1".into()));
    }
    let (mf, nf) = (degree as f64, n as f64);
    let peak = (h * (mf + nf - 0.5)).sqrt();
    let width = (h / 2.0).sqrt();
    let value = integrate_log(|r| log_i1_integrand(r, h, degree, n), 0.0, None, peak, width)?;
    let exact = (ln_gamma(mf + nf) - ln_gamma(mf + 1.0) - ln_gamma(nf)).exp();
    let rel = (value - exact).abs() / exact;
    let cap = (mf + nf).powf(nf);
    let params = [("h", h), ("M", mf), ("n", nf), ("relative_error", rel)];
    Ok(
        AuditReport::new("radial_i1", &params, value, exact, rel <= 1e-8 && exact <= cap * (1.0 + 1e-12))
            .with_notes(format!("quadrature vs (M+n-1)!/(M!(n-1)!); upper cap (M+n)^n = {cap}")),
    )
}

/// Tail integrals `J^- = ∫_0^{1-δ} t^ρ e^{-ρt} dt` and
/// `J^+ = ∫_{1+δ}^∞ t^ρ e^{-ρt} dt` against their explicit bounds, plus a
/// calibration ratio against `exp(-ρ(1+δ²/4))/(ρδ²)`.
pub fn tail_j(rho: f64, delta: f64) -> Result<Vec<AuditReport>> {
    if rho.is_nan() || rho <= 0.0 || delta.is_nan() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::InvalidArgument("tail integrals need rho > 0, 0 < delta < 1".into()));
    }
    let log_f = |t: f64| rho * (t.ln() - t);
    let scale = 1.0 / rho.sqrt();
    let j_minus = integrate_log(log_f, 0.0, Some(1.0 - delta), 1.0, scale)?;
    let j_plus = integrate_log(log_f, 1.0 + delta, None, 1.0, scale)?;

    let minus_bound = (rho * ((1.0 - delta).ln() - 1.0 + delta)).exp() / (rho * delta);
    let c_plus = 1.0 + delta - (1.0 + delta).ln();
    let plus_bound = c_plus / (c_plus - 1.0) * (-rho * c_plus).exp() / rho;
    let final_bound = (-rho * (1.0 + delta * delta / 4.0)).exp() / (rho * delta * delta);
    let params = [("rho", rho), ("delta", delta)];
    let total = j_minus + j_plus;
    Ok(vec![
        AuditReport::new("tail_j_minus", &params, j_minus, minus_bound, j_minus <= minus_bound)
            .with_notes("J- <= ((1-delta) e^{delta-1})^rho / (rho delta)"),
        AuditReport::new("tail_j_plus", &params, j_plus, plus_bound, j_plus <= plus_bound)
            .with_notes("J+ <= c+/(c+ - 1) e^{-rho c+}/rho, c+ = 1 + delta - log(1 + delta)"),
        AuditReport::new("tail_j_calibration", &params, total, final_bound, true)
            .with_notes("ratio measures the unspecified constant of the final estimate"),
    ])
}

/// `(1+δ)e^{-δ} ≤ e^{-δ²/4}` on `δ = k/(points+1)`, `k = 1..=points`.
pub fn elementary_inequality(points: usize) -> AuditReport {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_delta = 0.0;
    for k in 1..=points {
        let d = k as f64 / (points + 1) as f64;
        // compare logs: log(1+δ) - δ + δ²/4 ≤ 0
        let gap = d.ln_1p() - d + d * d / 4.0;
        if gap > worst {
            worst = gap;
            worst_delta = d;
        }
    }
    AuditReport::new(
        "elementary_exp_inequality",
        &[("points", points as f64), ("worst_delta", worst_delta)],
        worst,
        0.0,
        worst <= 0.0,
    )
    .with_notes("largest value of log(1+delta) - delta + delta^2/4 on the grid")
}

/// Exact `‖Π^M ‖z‖^{2k} 1_Ω Π^M‖` with `Ω` the complement of the shell
/// `1-ε ≤ ‖z‖² ≤ 1+ε`: `h^k Γ(a)/Γ(M+n) [P(a, (1-ε)/h) + Q(a, (1+ε)/h)]`
/// with `a = M+k+n`. The operator acts on `P_M` as this scalar.
pub fn localization_norm(h: f64, degree: u32, k: u32, n: usize, epsilon: f64) -> Result<f64> {
    localization_split(h, degree, k, n, epsilon).map(|(_, outside)| outside)
}

/// `(inside, outside)` masses; their sum is `h^k Γ(M+k+n)/Γ(M+n)`.
pub fn localization_split(h: f64, degree: u32, k: u32, n: usize, epsilon: f64) -> Result<(f64, f64)> {
    if h.is_nan() || h <= 0.0 || n == 0 || epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument("localization needs h > 0, n >= 1, epsilon > 0".into()));
    }
    let a = (degree + k) as f64 + n as f64;
    let x_lo = ((1.0 - epsilon) / h).max(0.0);
    let x_hi = (1.0 + epsilon) / h;
    let (p_lo, _) = gamma::regularized_gamma(a, x_lo)?;
    let (p_hi, q_hi) = gamma::regularized_gamma(a, x_hi)?;
    let log_prefix = k as f64 * h.ln() + ln_gamma(a) - ln_gamma((degree as usize + n) as f64);
    let prefix = log_prefix.exp();
    Ok((prefix * (p_hi - p_lo).max(0.0), prefix * (p_lo + q_hi)))
}

/// The same outside mass by direct quadrature of `t^{a-1} e^{-t}`.
pub fn localization_norm_quadrature(h: f64, degree: u32, k: u32, n: usize, epsilon: f64) -> Result<f64> {
    let a = (degree + k) as f64 + n as f64;
    let log_norm = k as f64 * h.ln() - ln_gamma((degree as usize + n) as f64);
    let log_f = |t: f64| (a - 1.0) * t.ln() - t + log_norm;
    let peak = a - 1.0;
    let scale = a.sqrt();
    let x_lo = ((1.0 - epsilon) / h).max(0.0);
    let x_hi = (1.0 + epsilon) / h;
    Ok(integrate_log(log_f, 0.0, Some(x_lo), peak, scale)? + integrate_log(log_f, x_hi, None, peak, scale)?)
}

/// `h^k (M+k+n)^{2n+k} ε^{-2} exp(-Mε²/16)`.
pub fn localization_bound(h: f64, degree: u32, k: u32, n: usize, epsilon: f64) -> f64 {
    let (mf, kf, nf) = (degree as f64, k as f64, n as f64);
    (kf * h.ln() + (2.0 * nf + kf) * (mf + kf + nf).ln() - 2.0 * epsilon.ln() - mf * epsilon * epsilon / 16.0).exp()
}

/// Exact `E_ε` for weight exponent `k` against the localization estimate
/// times `calibration`. Requires the σ-window for `σ = h(M+k+n-1)`.
pub fn localization_e(params: &RegimeParams, k: u32, calibration: f64) -> Result<AuditReport> {
    let sigma = params.sigma_for(k);
    let window = WindowCheck::new(sigma, params.epsilon);
    if !window.pass() {
        return Err(Error::WindowViolated {
            sigma,
            epsilon: params.epsilon,
        });
    }
    let (h, degree, n, eps) = (params.h, params.degree, params.n, params.epsilon);
    let value = localization_norm(h, degree, k, n, eps)?;
    let bound = localization_bound(h, degree, k, n, eps);
    let mut pairs = params.pairs();
    pairs.extend([("k", k as f64), ("calibration", calibration), ("sigma_k", sigma)]);
    Ok(
        AuditReport::new("localization_e", &pairs, value, bound, value <= calibration * bound).with_notes(
            format!("exact squared E = {value:e}, E = {:e}; ratio to the estimate is calibration data", value.sqrt()),
        ),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Rayleigh quotient `‖‖z‖^k u‖²_{L²(Ω)} / ‖u‖²` for a random `u ∈ P_M`,
/// estimated by sampling `C^n` from a Gaussian of width matched to the
/// radial mass. `Ω` is the complement of the shell `1-ε ≤ ‖z‖² ≤ 1+ε`.
#[allow(clippy::too_many_arguments)]
pub fn localization_monte_carlo(
    h: f64,
    degree: u32,
    k: u32,
    n: usize,
    epsilon: f64,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> MonteCarloEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = enumerate_degree(n, degree);
    let coeffs: Vec<Complex64> = basis
        .iter()
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    // ‖u‖² = π^n h^{M+n} Σ|u_α|² α!; the π^n h^n cancels against the sampler
    let log_norm_u = basis
        .iter()
        .zip(&coeffs)
        .map(|(a, c)| {
            let lf: f64 = a.exponents().iter().map(|&e| ln_gamma(e as f64 + 1.0)).sum();
            (c.norm_sqr().ln() + lf).exp()
        })
        .sum::<f64>()
        .ln()
        + degree as f64 * h.ln();
    let exps: Vec<&[u32]> = basis.iter().map(|a| a.exponents()).collect();

    let s = h * (degree + k + n as u32) as f64 / n as f64;
    let chunks = 64usize;
    let per_chunk = samples.div_ceil(chunks);
    let sums = exec.map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64 + 1);
        let count = per_chunk.min(samples.saturating_sub(c * per_chunk));
        let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
        let sd = (s / 2.0).sqrt();
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for _ in 0..count {
            for zi in z.iter_mut() {
                let (x, y): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
                *zi = Complex64::new(sd * x, sd * y);
            }
            let r2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
            if r2 >= 1.0 - epsilon && r2 <= 1.0 + epsilon {
                continue;
            }
            let mut u = Complex64::new(0.0, 0.0);
            for (a, c) in exps.iter().zip(&coeffs) {
                let mut t = *c;
                for (zi, &e) in z.iter().zip(a.iter()) {
                    t *= zi.powu(e);
                }
                u += t;
            }
            let log_w = k as f64 * r2.ln() + u.norm_sqr().ln() + n as f64 * (s / h).ln() - r2 * (1.0 / h - 1.0 / s)
                - log_norm_u;
            let w = log_w.exp();
            sum += w;
            sum_sq += w * w;
        }
        (sum, sum_sq, count)
    });
    let (sum, sum_sq, count) = sums
        .into_iter()
        .fold((0.0, 0.0, 0usize), |acc, x| (acc.0 + x.0, acc.1 + x.1, acc.2 + x.2));
    let mean = sum / count as f64;
    let var = (sum_sq / count as f64 - mean * mean).max(0.0);
    MonteCarloEstimate {
        mean,
        std_error: (var / count as f64).sqrt(),
        samples: count,
    }
}

/// `λ(f)` and `Λ(f)` as used by the basic inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FormInvariants {
    pub lambda: f64,
    pub big_lambda: f64,
}

impl FormInvariants {
    pub fn compute(form: &HermitianForm, opts: &SphereOptions) -> Result<Self> {
        Ok(FormInvariants {
            lambda: lambda_min(form, opts)?.value,
            big_lambda: form.big_lambda(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasicRhs {
    pub params: RegimeParams,
    /// Right-hand side of the basic inequality.
    pub value: f64,
    pub positive: bool,
    /// `λ(1-2ε)^m`
    pub a0: f64,
    /// `λ E(h, M, 0) (1-2ε)^m`
    pub a1: f64,
    /// `Λ Σ_{j≥1} (nm²h)^j/j! (1+2ε)^{m-j}`
    pub a2: f64,
    /// `Λ Σ_{j≥0} (nm²h)^j/j! E(h, M, m-j)`
    pub a3: f64,
    /// Lower bound for `q` on the shell `1-2ε ≤ ‖z‖² ≤ 1+2ε`.
    pub annulus_bound: f64,
    /// Present when the annulus was sampled.
    pub annulus_check: Option<AuditReport>,
}

/// Evaluates the basic inequality with exact localization values.
/// `annulus_samples = 0` skips sampling `q` on the shell.
pub fn basic_rhs(
    form: &HermitianForm,
    inv: &FormInvariants,
    params: &RegimeParams,
    annulus_samples: usize,
    seed: u64,
) -> Result<BasicRhs> {
    let (m, n, h, eps) = (form.m(), form.n(), params.h, params.epsilon);
    for k in 0..=m {
        let sigma = params.sigma_for(k);
        if !WindowCheck::new(sigma, eps).pass() {
            return Err(Error::WindowViolated { sigma, epsilon: eps });
        }
    }
    let (lambda, big) = (inv.lambda, inv.big_lambda);
    let step = n as f64 * (m as f64).powi(2) * h;
    let mut fact = 1.0;
    let mut a2 = 0.0;
    let mut a3 = 0.0;
    for j in 0..=m {
        if j > 0 {
            fact *= j as f64;
        }
        let w = step.powi(j as i32) / fact;
        if j > 0 {
            a2 += w * (1.0 + 2.0 * eps).powi((m - j) as i32);
        }
        a3 += w * localization_norm(h, params.degree, m - j, n, eps)?;
    }
    a2 *= big;
    a3 *= big;
    let shrink = (1.0 - 2.0 * eps).powi(m as i32);
    let e0 = localization_norm(h, params.degree, 0, n, eps)?;
    let a0 = lambda * shrink;
    let a1 = a0 * e0;
    let value = (1.0 - e0) * (a0 - a2) - a3;
    let lead = if lambda >= 0.0 {
        lambda * shrink
    } else {
        lambda * (1.0 + 2.0 * eps).powi(m as i32)
    };
    let annulus_bound = lead - a2;

    let annulus_check = if annulus_samples > 0 {
        Some(annulus_q_check(form, h, eps, annulus_bound, annulus_samples, seed)?)
    } else {
        None
    };
    Ok(BasicRhs {
        params: *params,
        value,
        positive: value > 0.0,
        a0,
        a1,
        a2,
        a3,
        annulus_bound,
        annulus_check,
    })
}

fn annulus_q_check(
    form: &HermitianForm,
    h: f64,
    eps: f64,
    bound: f64,
    samples: usize,
    seed: u64,
) -> Result<AuditReport> {
    let h_exact: BigRational = from_f64(h).ok_or_else(|| Error::InvalidArgument("h is not finite".into()))?;
    let q = form.q_symbol(&h_exact)?;
    let layers: Vec<(f64, crate::forms::CompiledForm)> = q
        .layers
        .iter()
        .map(|l| (l.weight.to_f64().unwrap_or(0.0), l.form.compile()))
        .collect();
    let lo = (1.0 - 2.0 * eps).max(0.0);
    let hi = 1.0 + 2.0 * eps;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    for u in unit_sphere_samples(form.n(), samples, seed) {
        let r = rng.random_range(lo..=hi).sqrt();
        let z: Vec<Complex64> = u.iter().map(|w| w * r).collect();
        let v: f64 = layers.iter().map(|(w, cf)| w * cf.value_unchecked(&z)).sum();
        min = min.min(v);
    }
    let slack = 1e-9 * form.coefficient_abs_sum().max(1.0);
    let applicable = 1.0 - 2.0 * eps >= 0.0;
    let pass = !applicable || min >= bound - slack;
    let notes = if applicable {
        "sampled min of q on the shell vs its lower bound"
    } else {
        "shell reaches the origin (epsilon > 1/2); bound not asserted"
    };
    Ok(AuditReport::new(
        "annulus_q_min",
        &[("h", h), ("epsilon", eps), ("samples", samples as f64)],
        min,
        bound,
        pass,
    )
    .with_notes(notes))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct H0Report {
    /// Largest grid `h` with a positive right-hand side.
    pub h: f64,
    pub implied_n: u32,
    pub rhs: f64,
    /// `(h, rhs)` for every grid point inside the σ-window.
    pub scanned: Vec<(f64, f64)>,
}

/// `h = 1/N` for `N` from 2 to `max_n`, roughly 3% apart, decreasing in `h`.
pub fn default_h_grid(max_n: u32) -> Vec<f64> {
    let mut shifts = Vec::new();
    let mut x = 2.0f64;
    while x <= max_n as f64 {
        let s = x.round() as u32;
        if shifts.last() != Some(&s) {
            shifts.push(s);
        }
        x *= 1.03;
    }
    shifts.into_iter().map(|s| 1.0 / s as f64).collect()
}

/// Scans `h` downward and returns the first grid point where the basic
/// inequality's right-hand side is positive, with `ε = h^{1/3}`.
pub fn empirical_h0(
    form: &HermitianForm,
    inv: &FormInvariants,
    h_grid: &[f64],
    exec: Execution,
) -> Result<H0Report> {
    if let Err(mut problems) = form.validate() {
        return Err(problems.remove(0));
    }
    if inv.lambda <= 0.0 {
        return Err(Error::NoPositiveFound);
    }
    let mut grid = h_grid.to_vec();
    grid.sort_by(|a, b| b.total_cmp(a));
    let (m, n) = (form.m(), form.n());
    let values = exec.map(&grid, |&h| {
        let params = RegimeParams::from_h(h, m, n);
        basic_rhs(form, inv, &params, 0, 0).ok().map(|r| (h, params.shift, r.value))
    });
    let scanned: Vec<(f64, f64)> = values.iter().flatten().map(|&(h, _, v)| (h, v)).collect();
    values
        .into_iter()
        .flatten()
        .find(|&(_, _, v)| v > 0.0)
        .map(|(h, implied_n, rhs)| H0Report {
            h,
            implied_n,
            rhs,
            scanned: scanned.clone(),
        })
        .ok_or(Error::NoPositiveFound)
}

#[cfg(test)]
mod tests;
