//! On-disk formats. Rationals travel as `"p/q"` strings; decimals are
//! accepted on input and converted exactly.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use hermsos::multiindex::enumerate_degree;
use hermsos::multiplier::{Square, Verification};
use hermsos::rational::{format_rational, from_f64, parse_rational, to_f64};
use hermsos::{CRational, CertificateMode, Error, HermitianForm, MultiIndex, SosCertificate};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

fn current_version() -> u32 {
    FORMAT_VERSION
}

fn zero_string() -> String {
    "0".to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    #[serde(default = "current_version")]
    pub format_version: u32,
    pub n: usize,
    pub m: u32,
    pub terms: Vec<TermEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn check_version(v: u32) -> Result<(), Error> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::Parse(format!("format_version: unsupported version {v}")))
    }
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

fn parse_field(s: &str, field: &str) -> Result<BigRational, Error> {
    parse_rational(s).map_err(|e| Error::Parse(format!("{field}: {}", strip_prefix(&e))))
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Parse(msg) => msg.clone(),
        other => other.to_string(),
    }
}

fn check_index(idx: &[u32], n: usize, m: u32, field: &str) -> Result<MultiIndex, Error> {
    let mi = MultiIndex::new(idx.to_vec());
    if idx.len() != n || mi.degree() != m {
        return Err(Error::Parse(format!(
            "{field}: {mi} needs {n} entries summing to {m}"
        )));
    }
    Ok(mi)
}

impl FormFile {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let file: FormFile = serde_json::from_str(text).map_err(|e| json_error("form file", e))?;
        check_version(file.format_version)?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| Error::Parse(format!("{}: {}", path.display(), strip_prefix(&e))))
    }

    /// Builds the form and checks hermitian symmetry.
    pub fn to_form(&self) -> Result<HermitianForm, Error> {
        if self.n == 0 {
            return Err(Error::Parse("n: must be at least 1".into()));
        }
        let mut form = HermitianForm::zero(self.n, self.m);
        let mut seen = HashSet::new();
        for (i, t) in self.terms.iter().enumerate() {
            let alpha = check_index(&t.alpha, self.n, self.m, &format!("terms[{i}].alpha"))?;
            let beta = check_index(&t.beta, self.n, self.m, &format!("terms[{i}].beta"))?;
            if !seen.insert((alpha.clone(), beta.clone())) {
                return Err(Error::Parse(format!("terms[{i}]: duplicate pair ({alpha}, {beta})")));
            }
            let re = parse_field(&t.re, &format!("terms[{i}].re"))?;
            let im = parse_field(&t.im, &format!("terms[{i}].im"))?;
            form.set(alpha, beta, CRational::new(re, im));
        }
        if let Err(mut problems) = form.validate() {
            return Err(problems.remove(0));
        }
        Ok(form)
    }

    /// Terms in graded-lex order on `α`, then `β`.
    pub fn from_form(form: &HermitianForm) -> Self {
        FormFile {
            format_version: FORMAT_VERSION,
            n: form.n(),
            m: form.m(),
            terms: form
                .terms()
                .map(|(a, b, c)| TermEntry {
                    alpha: a.exponents().to_vec(),
                    beta: b.exponents().to_vec(),
                    re: format_rational(&c.re),
                    im: format_rational(&c.im),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormRef {
    Inline(FormFile),
    /// Relative paths resolve against the certificate's directory.
    Path(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    #[serde(default = "current_version")]
    pub format_version: u32,
    pub form: FormRef,
    #[serde(rename = "N")]
    pub shift: u32,
    pub mode: ModeName,
    pub squares: Vec<SquareEntry>,
    pub verification: VerificationEntry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Exact,
    Float,
}

impl From<ModeName> for CertificateMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Exact => CertificateMode::Exact,
            ModeName::Float => CertificateMode::Floating,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareEntry {
    pub weight: String,
    pub coefficients: Vec<CoefficientEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientEntry {
    pub index: Vec<u32>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationEntry {
    pub status: String,
    #[serde(default)]
    pub residual: Option<f64>,
}

impl From<&Verification> for VerificationEntry {
    fn from(v: &Verification) -> Self {
        let (status, residual) = match v {
            Verification::ExactPass => ("exact_pass", None),
            Verification::FloatPass { residual } => ("float_pass", Some(*residual)),
            Verification::Fail { residual } => ("fail", Some(*residual)),
            Verification::Unverified => ("unverified", None),
        };
        VerificationEntry {
            status: status.to_string(),
            residual: residual.map(finite_or_max),
        }
    }
}

/// JSON has no infinity.
fn finite_or_max(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

/// Floats are stored as their exact binary value, so reloading is bit-exact.
fn float_string(x: f64) -> String {
    from_f64(x).map(|r| format_rational(&r)).unwrap_or_else(|| "0".into())
}

impl CertificateFile {
    pub fn from_certificate(cert: &SosCertificate, form: FormRef) -> Self {
        let entry = |i: usize, re: String, im: String| CoefficientEntry {
            index: cert.basis[i].exponents().to_vec(),
            re,
            im,
        };
        let squares = cert
            .squares
            .iter()
            .map(|sq| match sq {
                Square::Exact {
                    weight,
                    coefficients,
                } => SquareEntry {
                    weight: format_rational(weight),
                    coefficients: coefficients
                        .iter()
                        .map(|(i, c)| entry(*i, format_rational(&c.re), format_rational(&c.im)))
                        .collect(),
                },
                Square::Float {
                    weight,
                    coefficients,
                } => SquareEntry {
                    weight: float_string(*weight),
                    coefficients: coefficients
                        .iter()
                        .map(|(i, c)| entry(*i, float_string(c.re), float_string(c.im)))
                        .collect(),
                },
            })
            .collect();
        CertificateFile {
            format_version: FORMAT_VERSION,
            form,
            shift: cert.shift,
            mode: match cert.mode {
                CertificateMode::Exact => ModeName::Exact,
                CertificateMode::Floating => ModeName::Float,
            },
            squares,
            verification: (&cert.verification).into(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let file: CertificateFile = serde_json::from_str(&text)
            .map_err(|e| json_error(&format!("{}", path.display()), e))?;
        check_version(file.format_version)?;
        Ok(file)
    }

    /// Resolves the form reference; `base` is the certificate's directory.
    pub fn resolve_form(&self, base: &Path) -> Result<HermitianForm, Error> {
        match &self.form {
            FormRef::Inline(f) => {
                check_version(f.format_version)?;
                f.to_form()
            }
            FormRef::Path(p) => FormFile::load(&base.join(p))?.to_form(),
        }
    }

    /// Rebuilds the in-memory certificate (verification marked unverified).
    pub fn to_certificate(&self, form: &HermitianForm) -> Result<SosCertificate, Error> {
        let (n, m) = (form.n(), form.m());
        let basis = enumerate_degree(n, m + self.shift);
        let position: HashMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mode: CertificateMode = self.mode.into();
        let mut squares = Vec::with_capacity(self.squares.len());
        for (s, sq) in self.squares.iter().enumerate() {
            let weight = parse_field(&sq.weight, &format!("squares[{s}].weight"))?;
            let mut coefficients = Vec::with_capacity(sq.coefficients.len());
            for (c, entry) in sq.coefficients.iter().enumerate() {
                let field = format!("squares[{s}].coefficients[{c}]");
                let index = MultiIndex::new(entry.index.clone());
                let &i = position
                    .get(&index)
                    .ok_or_else(|| Error::Parse(format!("{field}.index: {index} is not in the degree {} basis", m + self.shift)))?;
                let re = parse_field(&entry.re, &format!("{field}.re"))?;
                let im = parse_field(&entry.im, &format!("{field}.im"))?;
                coefficients.push((i, CRational::new(re, im)));
            }
            squares.push(match mode {
                CertificateMode::Exact => Square::Exact {
                    weight,
                    coefficients,
                },
                CertificateMode::Floating => Square::Float {
                    weight: to_f64(&weight),
                    coefficients: coefficients
                        .into_iter()
                        .map(|(i, c)| (i, Complex64::new(to_f64(&c.re), to_f64(&c.im))))
                        .collect(),
                },
            });
        }
        if squares.iter().any(|sq| matches!(sq, Square::Exact { weight, .. } if weight.is_zero())) {
            return Err(Error::Parse("squares: zero weight".into()));
        }
        Ok(SosCertificate {
            n,
            m,
            shift: self.shift,
            mode,
            basis,
            squares,
            verification: Verification::Unverified,
        })
    }
}
