//! File formats and subcommands behind the `hermsos` binary.

pub mod commands;
pub mod files;

pub use files::{CertificateFile, FormFile};
