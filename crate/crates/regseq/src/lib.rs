//! Asymptotic analysis of summatory functions of q-regular sequences.

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dirichlet;
pub mod error;
pub mod esthetic;
pub mod format;
pub mod fourier;
pub mod linrep;
pub mod poly;
pub mod scalar;
pub mod spectral;
pub mod symmetry;
pub mod tauber;

pub use error::{Error, Result};
pub use linrep::{digits, DigitExpansion, LinearRepresentation};
pub use scalar::{Real, Scalar};

/// Complex double representation, used by the analytic layers.
pub type Rep = LinearRepresentation<num_complex::Complex64>;
/// Machine-integer representation.
pub type IntRep = LinearRepresentation<i64>;
/// Arbitrary-precision integer representation.
pub type ExactRep = LinearRepresentation<num_bigint::BigInt>;
/// Real double representation.
pub type RealRep = LinearRepresentation<f64>;
/// Double-precision periodic family for the pseudo-Tauberian layer.
pub type Family = tauber::PeriodicFunctionFamily<f64>;
/// Double-precision `Ψ` family.
pub type Psi = tauber::PsiFamily<f64>;
