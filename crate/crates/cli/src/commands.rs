use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hermsos::audit::{
    self, basic_rhs, check_laplacian_powers, default_h_grid, elementary_inequality, empirical_h0,
    localization_monte_carlo, localization_norm, radial_i1, tail_j, AuditReport, FormInvariants,
    RegimeParams, WindowCheck,
};
use hermsos::bounds::{bound_report, BoundOptions, BoundReport, Field};
use hermsos::corpus::f_c;
use hermsos::forms::{lambda_min, lambda_sharp};
use hermsos::multiplier::Witness;
use hermsos::rational::{format_rational, rat, to_f64};
use hermsos::{
    is_psd, minimal_sos_n, multiplier_matrix, sos_decompose, verify_certificate, Error, Execution,
    HermitianForm, MultiplierOptions, PsdMode, SphereOptions,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::files::{CertificateFile, FormFile, FormRef, ModeName, FORMAT_VERSION};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotPsd { .. }
        | Error::NotFound { .. }
        | Error::VerificationFailed { .. }
        | Error::NonPositiveLambda { .. }
        | Error::NoPositiveFound
        | Error::WindowViolated { .. } => EXIT_NEGATIVE,
        Error::SizeCapExceeded { .. } | Error::Overflow => EXIT_RESOURCE,
        Error::NumericalIndeterminate { .. }
        | Error::QuadratureNonConvergence { .. }
        | Error::SpecialFunctionNonConvergence(_)
        | Error::NonRealValue { .. } => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

/// Result of a command: human text, machine-readable document, exit code.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

pub type CmdResult = Result<Outcome, CliError>;

fn document(command: &str, body: Value) -> Value {
    let mut doc = json!({ "format_version": FORMAT_VERSION, "command": command });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    doc
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    pub tolerance: f64,
    pub size_cap: usize,
}

impl Settings {
    fn sphere(&self) -> SphereOptions {
        SphereOptions {
            tolerance: self.tolerance,
            seed: self.seed,
            ..SphereOptions::default()
        }
    }

    fn multiplier(&self) -> MultiplierOptions {
        MultiplierOptions {
            size_cap: self.size_cap,
            ..MultiplierOptions::default()
        }
    }
}

pub fn load_form(path: &Path) -> Result<HermitianForm, CliError> {
    Ok(FormFile::load(path)?.to_form()?)
}

pub fn analyze(path: &Path, s: &Settings) -> CmdResult {
    let form = load_form(path)?;
    let opts = s.sphere();
    let lam = lambda_min(&form, &opts)?;
    let sharp = lambda_sharp(&form, &opts)?;
    let tilde = form.lambda_tilde();
    let radius = lam.radius.unwrap_or(opts.tolerance * form.coefficient_abs_sum());
    let mut text = String::new();
    let _ = writeln!(text, "n            {}", form.n());
    let _ = writeln!(text, "m            {}", form.m());
    let _ = writeln!(text, "terms        {}", form.nnz());
    let _ = writeln!(text, "diagonal     {}", form.is_diagonal());
    let _ = writeln!(text, "lambda       {:.12} +/- {radius:.1e}", lam.value);
    let _ = writeln!(text, "Lambda       {:.12}", form.big_lambda());
    let _ = writeln!(
        text,
        "Lambda~      {} ({:.12}){}",
        format_rational(&tilde.value),
        to_f64(&tilde.value),
        if tilde.off_diagonal { " off-diagonal" } else { "" }
    );
    let _ = write!(text, "Lambda#      {:.12}", sharp.value);
    let json = document(
        "analyze",
        json!({
            "n": form.n(),
            "m": form.m(),
            "terms": form.nnz(),
            "diagonal": form.is_diagonal(),
            "lambda": { "value": lam.value, "radius": radius, "certified_lower_bound": lam.certified_bound },
            "big_lambda": form.big_lambda(),
            "big_lambda_squared": format_rational(&form.big_lambda_sq()),
            "lambda_tilde": { "value": format_rational(&tilde.value), "off_diagonal": tilde.off_diagonal },
            "lambda_sharp": sharp.value,
        }),
    );
    Ok(Outcome {
        code: EXIT_OK,
        text,
        json,
    })
}

pub fn certify(path: &Path, shift: u32, mode: ModeName, out: Option<&Path>, s: &Settings) -> CmdResult {
    let form = load_form(path)?;
    let opts = s.multiplier();
    match sos_decompose(&form, shift, mode.into(), &opts) {
        Ok(cert) => {
            let file = CertificateFile::from_certificate(&cert, FormRef::Inline(FormFile::from_form(&form)));
            if let Some(out) = out {
                let body = serde_json::to_string_pretty(&file).map_err(|e| CliError {
                    code: EXIT_INPUT,
                    message: e.to_string(),
                })?;
                std::fs::write(out, body + "\n").map_err(|e| CliError {
                    code: EXIT_INPUT,
                    message: format!("{}: {e}", out.display()),
                })?;
            }
            let passed = cert.verification.passed();
            let text = format!(
                "N = {shift}: {} squares over a basis of {} monomials, verification {}{}",
                cert.squares.len(),
                cert.basis.len(),
                file.verification.status,
                out.map(|p| format!(", written to {}", p.display())).unwrap_or_default()
            );
            Ok(Outcome {
                code: if passed { EXIT_OK } else { EXIT_NEGATIVE },
                text,
                json: document("certify", json!({ "certificate": to_value(&file) })),
            })
        }
        Err(Error::NotPsd { .. }) => not_psd(&form, shift, mode, &opts),
        Err(e) => Err(e.into()),
    }
}

fn not_psd(form: &HermitianForm, shift: u32, mode: ModeName, opts: &MultiplierOptions) -> CmdResult {
    let matrix = multiplier_matrix(form, shift, opts)?;
    let psd_mode = match mode {
        ModeName::Exact => PsdMode::Exact,
        ModeName::Float => PsdMode::floating(),
    };
    let report = is_psd(&matrix, psd_mode)?;
    let (support, value) = match &report.witness {
        Some(Witness::Exact(v)) => {
            let q = matrix.quadratic_form(v);
            (v.iter().filter(|c| !num_traits::Zero::is_zero(*c)).count(), format_rational(&q.re))
        }
        Some(Witness::Float(v)) => (
            v.iter().filter(|c| c.norm() > 0.0).count(),
            format!("{:e}", matrix.quadratic_form_f64(v)),
        ),
        None => (0, "n/a".into()),
    };
    let text = format!(
        "N = {shift}: multiplier matrix is not PSD; witness with {support} nonzero entries gives <Mv, v> = {value}"
    );
    Ok(Outcome {
        code: EXIT_NEGATIVE,
        text,
        json: document(
            "certify",
            json!({ "N": shift, "psd": false, "witness": { "support": support, "quadratic_form": value } }),
        ),
    })
}

pub fn verify(path: &Path, s: &Settings) -> CmdResult {
    let file = CertificateFile::load(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let form = file.resolve_form(&base)?;
    let cert = file.to_certificate(&form)?;
    let verdict = verify_certificate(&form, &cert, &s.multiplier());
    let entry: crate::files::VerificationEntry = (&verdict).into();
    let text = match entry.residual {
        Some(r) => format!("{} (residual {r:e})", entry.status),
        None => entry.status.clone(),
    };
    Ok(Outcome {
        code: if verdict.passed() { EXIT_OK } else { EXIT_NEGATIVE },
        text,
        json: document("verify", json!({ "N": file.shift, "verification": to_value(&entry) })),
    })
}

pub fn search(path: &Path, n_max: u32, s: &Settings) -> CmdResult {
    let form = load_form(path)?;
    match minimal_sos_n(&form, n_max, &s.multiplier()) {
        Ok(n) => Ok(Outcome {
            code: EXIT_OK,
            text: n.to_string(),
            json: document("search", json!({ "n_max": n_max, "minimal_n": n })),
        }),
        Err(Error::NotFound { .. }) => Ok(Outcome {
            code: EXIT_NEGATIVE,
            text: format!("not found for N <= {n_max}"),
            json: document("search", json!({ "n_max": n_max, "minimal_n": null })),
        }),
        Err(e) => Err(e.into()),
    }
}

fn field_text<T: std::fmt::Display>(f: &Field<T>) -> String {
    match f {
        Field::Value(v) => v.to_string(),
        Field::Unavailable(why) => format!("unavailable ({why})"),
    }
}

fn bounds_table(r: &BoundReport) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "n = {}, m = {}, diagonal = {}", r.n, r.m, r.diagonal);
    let _ = writeln!(
        t,
        "lambda = {:.9}, Lambda = {:.9}, Lambda~ = {:.9}, Lambda# = {:.9}",
        r.lambda.value, r.big_lambda, r.lambda_tilde, r.lambda_sharp.value
    );
    let _ = writeln!(t, "{:<28} N", "bound");
    let rows = [
        ("empirical (exact PSD)", field_text(&r.empirical_minimal_n)),
        ("Powers-Resnick", field_text(&r.powers_resnick_n)),
        ("To-Yeung", field_text(&r.to_yeung_n)),
        ("Nie-Schweighofer", field_text(&r.nie_schweighofer_n)),
        (&*format!("certified (C = {})", r.universal_c_used), field_text(&r.certified_n)),
    ];
    for (name, value) in rows {
        let _ = writeln!(t, "{name:<28} {value}");
    }
    let _ = write!(t, "smallest sufficient C        {}", field_text(&r.smallest_sufficient_c));
    for v in &r.violations {
        let _ = write!(t, "\nviolation: {v}");
    }
    t
}

pub fn bounds(path: &Path, c: f64, n_max: u32, s: &Settings) -> CmdResult {
    let form = load_form(path)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument("--C must be positive".into()).into());
    }
    let opts = BoundOptions {
        universal_c: c,
        n_max,
        sphere: s.sphere(),
        multiplier: s.multiplier(),
        ..BoundOptions::default()
    };
    let report = bound_report(&form, &opts)?;
    Ok(Outcome {
        code: if report.violations.is_empty() { EXIT_OK } else { EXIT_NEGATIVE },
        text: bounds_table(&report),
        json: document("bounds", json!({ "report": to_value(&report) })),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Laplacian,
    Radial,
    Tails,
    Localization,
    Basic,
    All,
}

/// Parameters for `audit`. Unset values fall back to per-suite defaults.
#[derive(Clone, Debug)]
pub struct AuditParams {
    pub form: Option<PathBuf>,
    pub samples: Option<usize>,
    pub rho: f64,
    pub delta: f64,
    pub h: f64,
    pub degree: u32,
    pub k: u32,
    pub n: usize,
    pub epsilon: f64,
    pub shift: Option<u32>,
    pub n_max: u32,
}

fn audit_form(p: &AuditParams) -> Result<HermitianForm, CliError> {
    match &p.form {
        Some(path) => load_form(path),
        None => Ok(f_c(rat(1, 1))),
    }
}

fn suite_reports(suite: Suite, p: &AuditParams, s: &Settings) -> Result<Vec<AuditReport>, CliError> {
    let exec = Execution::default();
    Ok(match suite {
        Suite::Laplacian => check_laplacian_powers(&audit_form(p)?, p.samples.unwrap_or(10_000), s.seed, exec)?,
        Suite::Radial => vec![radial_i1(p.h, p.degree, p.n)?],
        Suite::Tails => {
            let mut r = tail_j(p.rho, p.delta)?;
            r.push(elementary_inequality(99));
            r
        }
        Suite::Localization => {
            if !(p.h > 0.0 && p.epsilon > 0.0 && p.n > 0) {
                return Err(Error::InvalidArgument("localization needs h > 0, epsilon > 0, n >= 1".into()).into());
            }
            let params = RegimeParams::new(p.h, p.degree, p.k, p.n, p.epsilon);
            let window = WindowCheck::new(params.sigma_for(p.k), p.epsilon);
            let mut r = vec![window.to_report()];
            if window.pass() {
                r.push(audit::localization_e(&params, p.k, 1.0)?);
                let samples = p.samples.unwrap_or(200_000);
                let exact = localization_norm(p.h, p.degree, p.k, p.n, p.epsilon)?;
                let est = localization_monte_carlo(p.h, p.degree, p.k, p.n, p.epsilon, samples, s.seed, exec);
                r.push(monte_carlo_report(p, exact, &est));
            }
            r
        }
        Suite::Basic => basic_reports(p, s)?,
        Suite::All => {
            let mut all = Vec::new();
            for suite in [Suite::Laplacian, Suite::Radial, Suite::Tails, Suite::Localization, Suite::Basic] {
                all.extend(suite_reports(suite, p, s)?);
            }
            all
        }
    })
}

fn monte_carlo_report(p: &AuditParams, exact: f64, est: &audit::MonteCarloEstimate) -> AuditReport {
    let z = (est.mean - exact).abs() / est.std_error;
    let mut parameters = std::collections::BTreeMap::new();
    for (k, v) in [
        ("h", p.h),
        ("M", p.degree as f64),
        ("k", p.k as f64),
        ("n", p.n as f64),
        ("epsilon", p.epsilon),
        ("samples", est.samples as f64),
        ("std_error", est.std_error),
    ] {
        parameters.insert(k.to_string(), v);
    }
    AuditReport {
        check: "localization_monte_carlo".into(),
        parameters,
        lhs: est.mean,
        rhs: exact,
        ratio: est.mean / exact,
        pass: z <= 3.0,
        notes: format!("estimate within {z:.2} standard errors of the exact value"),
    }
}

fn basic_reports(p: &AuditParams, s: &Settings) -> Result<Vec<AuditReport>, CliError> {
    let form = audit_form(p)?;
    let inv = FormInvariants::compute(&form, &s.sphere())?;
    let samples = p.samples.unwrap_or(10_000);
    let (m, n) = (form.m(), form.n());
    let mut reports = Vec::new();
    let params = match p.shift {
        Some(shift) => RegimeParams::standard(shift.max(1), m, n),
        None => {
            let h0 = empirical_h0(&form, &inv, &default_h_grid(1_000_000), Execution::default())?;
            let minimal = minimal_sos_n(&form, p.n_max, &s.multiplier());
            let mut parameters = std::collections::BTreeMap::new();
            parameters.insert("h0".to_string(), h0.h);
            parameters.insert("n_max".to_string(), p.n_max as f64);
            let (rhs, pass, notes) = match minimal {
                Ok(min) => (min as f64, h0.implied_n >= min, "implied N from the scan vs exact minimal N".into()),
                Err(e) => (f64::NAN, true, format!("exact minimum unavailable: {e}")),
            };
            reports.push(AuditReport {
                check: "basic_h0".into(),
                parameters,
                lhs: h0.implied_n as f64,
                rhs,
                ratio: h0.implied_n as f64 / rhs,
                pass,
                notes,
            });
            RegimeParams::from_h(h0.h, m, n)
        }
    };
    let b = basic_rhs(&form, &inv, &params, samples, s.seed)?;
    let mut parameters = std::collections::BTreeMap::new();
    for (k, v) in [
        ("h", params.h),
        ("N", params.shift as f64),
        ("epsilon", params.epsilon),
        ("lambda", inv.lambda),
        ("Lambda", inv.big_lambda),
        ("a0", b.a0),
        ("a2", b.a2),
        ("a3", b.a3),
    ] {
        parameters.insert(k.to_string(), v);
    }
    reports.push(AuditReport {
        check: "basic_rhs".into(),
        parameters,
        lhs: b.value,
        rhs: 0.0,
        ratio: 0.0,
        pass: true,
        notes: if b.positive {
            "right-hand side positive: the inequality certifies N".into()
        } else {
            "right-hand side not positive at this N".into()
        },
    });
    reports.extend(b.annulus_check);
    Ok(reports)
}

fn report_line(r: &AuditReport) -> String {
    let params: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(
        "{} {:<28} lhs={:.6e} rhs={:.6e} ratio={:.4e} [{}] {}",
        if r.pass { "PASS" } else { "FAIL" },
        r.check,
        r.lhs,
        r.rhs,
        r.ratio,
        params.join(" "),
        r.notes
    )
}

pub fn audit(suite: Suite, p: &AuditParams, s: &Settings) -> CmdResult {
    let reports = suite_reports(suite, p, s)?;
    let all_pass = reports.iter().all(|r| r.pass);
    let text = reports.iter().map(report_line).collect::<Vec<_>>().join("\n");
    Ok(Outcome {
        code: if all_pass { EXIT_OK } else { EXIT_NEGATIVE },
        text,
        json: document("audit", json!({ "pass": all_pass, "reports": to_value(&reports) })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct_by_category() {
        assert_eq!(exit_code(&Error::NotPsd { shift: 0 }), EXIT_NEGATIVE);
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_INPUT);
        assert_eq!(exit_code(&Error::SizeCapExceeded { dim: 2, cap: 1 }), EXIT_RESOURCE);
        assert_eq!(exit_code(&Error::QuadratureNonConvergence { error: 1.0 }), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::NumericalIndeterminate { min_eigenvalue: -1e-12 }), EXIT_NUMERICAL);
    }

    #[test]
    fn document_carries_version_and_command() {
        let d = document("search", json!({ "minimal_n": 1 }));
        assert_eq!(d["format_version"], FORMAT_VERSION);
        assert_eq!(d["command"], "search");
        assert_eq!(d["minimal_n"], 1);
    }
}
