use thiserror::Error;

use crate::multiindex::MultiIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient ({alpha}, {beta}) is not the conjugate of ({beta}, {alpha})")]
    SymmetryViolation { alpha: MultiIndex, beta: MultiIndex },

    #[error("multi-index {index} does not have {expected} entries summing to {degree}")]
    DegreeMismatch {
        index: MultiIndex,
        expected: usize,
        degree: u32,
    },

    #[error("point has {got} coordinates, form has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("form has bidegree zero")]
    DegreeZero,

    #[error("evaluation is not real: imaginary part {imag:e} exceeds tolerance {tol:e}")]
    NonRealValue { imag: f64, tol: f64 },

    #[error("multiplier dimension {dim} exceeds the size cap {cap}")]
    SizeCapExceeded { dim: usize, cap: usize },

    #[error("floating PSD verdict is indeterminate (smallest eigenvalue {min_eigenvalue:e}); use exact mode")]
    NumericalIndeterminate { min_eigenvalue: f64 },

    #[error("no PSD multiplier for N <= {n_max}")]
    NotFound { n_max: u32 },

    #[error("multiplier matrix at N = {shift} is not positive semidefinite")]
    NotPsd { shift: u32 },

    #[error("certificate verification failed (residual {residual:e})")]
    VerificationFailed { residual: f64 },

    #[error("sphere minimum lambda = {lambda:e} is not positive")]
    NonPositiveLambda { lambda: f64 },

    #[error("form has off-diagonal coefficients")]
    NotDiagonal,

    #[error("bound overflows double precision")]
    Overflow,

    #[error("quadrature did not converge (estimated error {error:e})")]
    QuadratureNonConvergence { error: f64 },

    #[error("special function did not converge: {0}")]
    SpecialFunctionNonConvergence(String),

    #[error("localization window violated: sigma = {sigma}, epsilon = {epsilon}")]
    WindowViolated { sigma: f64, epsilon: f64 },

    #[error("no positive right-hand side on the h grid")]
    NoPositiveFound,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
