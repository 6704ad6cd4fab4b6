//! Numerical laboratory for time-dependent Bell inequalities in Wigner form.
//!
//! The [`wigner`] module holds the inequality evaluators and the
//! local-hidden-variable soundness checks. Three physical scenarios feed them:
//! a precessing spin singlet ([`spin`]), neutral meson oscillations
//! ([`meson`]), and finite-time pseudoscalar decay ([`qft`]). [`scan`] explores
//! their parameter spaces.

// `!(x >= 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod meson;
pub mod qft;
pub mod qm2;
pub mod quad;
pub mod report;
pub mod scan;
pub mod specfun;
pub mod spin;
pub mod wigner;

pub use error::{Error, Result};
pub use report::{InequalityReport, DEFAULT_TOLERANCE};

/// Library version, echoed into machine-readable reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
