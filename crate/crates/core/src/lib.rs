//! Hermitian sum-of-squares certificates for bihomogeneous forms.
//!
//! A form `f(z, z̄) = Σ c_{αβ} z^α z̄^β` that is positive on the unit sphere
//! becomes a sum of squared moduli after multiplication by `⟨z, z̄⟩^N` for
//! large enough `N`. This crate builds the multiplier matrices, decides
//! positive semidefiniteness exactly, produces and verifies certificates,
//! evaluates the known sufficient bounds on `N`, and audits the analytic
//! estimates behind them.

pub mod audit;
pub mod bounds;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod forms;
pub mod multiindex;
pub mod multiplier;
pub mod rational;

pub use error::{Error, Result};
pub use exec::Execution;
pub use forms::{HermitianForm, SphereExtremum, SphereOptions};
pub use multiindex::MultiIndex;
pub use multiplier::{
    is_psd, minimal_sos_n, multiplier_matrix, sos_decompose, verify_certificate, CertificateMode,
    MultiplierMatrix, MultiplierOptions, PsdMode, SosCertificate,
};
pub use rational::CRational;
