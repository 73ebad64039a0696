//! Certified evaluation of four classical enveloping asymptotic expansions.
//!
//! The expansions covered are Binet's function J(z) (and through it ln Γ(z)),
//! the logarithm of the central binomial coefficient, ln Γ(z + ½), and
//! de Moivre's series for ln n! in powers of n + ½. For real positive
//! arguments each of these series *strictly envelops* its function: the
//! truncation error has the sign of the first omitted term and is smaller in
//! magnitude. That property turns every truncated sum into a two-sided
//! enclosure.
//!
//! Modules:
//!
//! * [`coeffs`] exact rational coefficients (Bernoulli numbers, β, β̃, β̂).
//! * [`series`] truncated sums, enclosures and truncation policy.
//! * [`oracle`] independent ground truth: big-integer combinatorics and
//!   double-exponential quadrature of the integral representations.
//! * [`demo`] a perturbed Binet function whose series is *not* enveloping.
//! * [`cli`] the command-line front end.

pub mod cli;
pub mod coeffs;
pub mod demo;
mod error;
pub mod oracle;
pub mod record;
pub mod series;
pub mod verify;

pub use error::{Error, Result};

/// Arbitrary-precision binary floating-point value. Its precision in bits is
/// carried by the value itself (`Real::prec`).
pub type Real = rug::Float;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Smallest accepted working precision in bits.
pub const MIN_PRECISION: u32 = 64;

/// Extra bits carried by constants and intermediate results.
pub const GUARD_BITS: u32 = 32;

/// Environment variable read by the CLI for its default precision.
pub const PRECISION_ENV: &str = "ENVELOPE_PRECISION";

pub(crate) fn check_precision(precision: u32) -> Result<u32> {
    if precision < MIN_PRECISION || precision > rug::float::prec_max() / 4 {
        return Err(Error::InvalidPrecision(precision));
    }
    Ok(precision)
}

/// Relative widening 2^-(P-32) applied to returned enclosures at working
/// precision `precision`.
pub fn rounding_slop(precision: u32) -> Real {
    let mut slop = Real::with_val(precision, 1);
    slop >>= precision - GUARD_BITS;
    slop
}
