use thiserror::Error;

use crate::Real;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The argument lies outside the region where the enveloping bounds hold.
    #[error("domain error: {0}")]
    Domain(String),

    /// No truncation at or below the minimum-term index meets the tolerance.
    #[error(
        "tolerance {tol:.6e} unattainable at this argument; best achievable bound is {best_bound} (k = {k})"
    )]
    ToleranceUnattainable { tol: Real, best_bound: Real, k: usize },

    #[error("quadrature did not converge after {levels} levels (last difference {estimate:.6e})")]
    QuadratureNonConvergence { levels: u32, estimate: Real },

    #[error("precision {0} bits is outside the supported range")]
    InvalidPrecision(u32),

    /// The scan for the minimum term ran past the supported number of terms.
    #[error("minimum term not reached within {limit} terms")]
    TermLimitExceeded { limit: usize },
}
