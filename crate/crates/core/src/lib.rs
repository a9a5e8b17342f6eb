//! Streaming prefix statistics and numerical verification of the median
//! version of Hardy's inequality.
//!
//! For nonnegative `x_1, ..., x_n` with prefix means `a_i` and lower
//! medians `m_i`,
//!
//! ```text
//! sum |m_i - a_i|^p <= 2^(1-p) (p/(p-1))^p sum x_i^p,     p > 1,
//! ```
//!
//! and the same holds for `A(t)`, `M(t)` of a function on `(0, inf)`. The
//! constant is sharp. This crate computes every quantity in those
//! statements (exactly where the backend allows) and checks them.

pub mod continuous;
pub mod discrete;
pub mod error;
pub mod exponent;
pub mod io;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod sharpness;
pub mod streaming;

pub use error::{Error, Result};
pub use exponent::{hardy_constant, pow_p, sharp_constant, Exponent, SharpConstant};
pub use report::{CheckKind, VerificationReport, Witness};
pub use scalar::{CompensatedSum, Rational, Scalar, Tolerance};
