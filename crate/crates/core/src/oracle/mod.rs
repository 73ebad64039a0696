//! Ground truth that does not go through the asymptotic series.
//!
//! Two independent routes: exact big-integer combinatorics for integer and
//! half-integer arguments, and quadrature of the integral representations
//!
//! ```text
//! β_k    = (1/π) ∫ η^{2k} w(η) dη
//! r_k(z) = ± 1/(π z^{2k-1}) ∫ η^{2k} / (z² + η²) · w(η) dη
//! ```
//!
//! with the positive weights w = -ln(1 - e^{-2πη}), ln coth(πη) and
//! ln(1 + e^{-2πη}). The first weight is sometimes printed with 2^{-2πη};
//! the exponential form used here is the correct one.

mod exact;
mod quadrature;

pub use exact::{
    exact_ln_central_binomial, exact_ln_factorial, exact_ln_gamma_half, exact_ln_gamma_of_half,
    exact_series_value,
};
pub use quadrature::{integrate_half_line, Estimate, QuadratureSpec, MAX_LEVELS};

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;

use crate::coeffs::Family;
use crate::series::{SeriesKind, Sign};
use crate::{Error, Real, Result};

/// The three integrand weights and the θ-ratios built from them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaFamily {
    /// -ln(1 - e^{-2πη}): β_k, r_k, θ_k.
    Theta,
    /// ln coth(πη): β̃_k, r̃_k, θ̃_k.
    ThetaTilde,
    /// ln(1 + e^{-2πη}): β̂_k, r̂_k, θ̂_k.
    ThetaHat,
}

impl ThetaFamily {
    pub const ALL: [ThetaFamily; 3] = [ThetaFamily::Theta, ThetaFamily::ThetaTilde, ThetaFamily::ThetaHat];

    /// The integrand weight at η > 0; positive on (0, ∞).
    pub fn weight(self, eta: &Real) -> Real {
        let w = eta.prec();
        let two_pi_eta = Real::with_val(w, Constant::Pi) * 2u32 * eta;
        match self {
            ThetaFamily::Theta => {
                if two_pi_eta > 1 {
                    -(-Real::with_val(w, -&two_pi_eta).exp()).ln_1p()
                } else {
                    // 1 - e^{-x} = -expm1(-x)
                    -(-Real::with_val(w, -&two_pi_eta).exp_m1()).ln()
                }
            }
            // coth(y) = 1 + 2 / (e^{2y} - 1)
            ThetaFamily::ThetaTilde => {
                let d = two_pi_eta.exp_m1();
                (Real::with_val(w, 2) / d).ln_1p()
            }
            ThetaFamily::ThetaHat => (-two_pi_eta).exp().ln_1p(),
        }
    }

    pub fn coefficient_family(self) -> Family {
        match self {
            ThetaFamily::Theta => Family::Beta,
            ThetaFamily::ThetaTilde => Family::BetaTilde,
            ThetaFamily::ThetaHat => Family::BetaHat,
        }
    }

    /// The series whose remainder this family represents.
    pub fn series_kind(self) -> SeriesKind {
        match self {
            ThetaFamily::Theta => SeriesKind::BinetJ,
            ThetaFamily::ThetaTilde => SeriesKind::CentralBinomial,
            ThetaFamily::ThetaHat => SeriesKind::GammaHalf,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ThetaFamily::Theta => "theta",
            ThetaFamily::ThetaTilde => "theta-tilde",
            ThetaFamily::ThetaHat => "theta-hat",
        }
    }
}

impl fmt::Display for ThetaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_argument(z: &Real) -> Result<()> {
    if z.is_finite() && z.is_sign_positive() && !z.is_zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("z must be finite and positive, got {}", z.to_f64())))
    }
}

fn pi(spec: &QuadratureSpec) -> Real {
    Real::with_val(spec.work(), Constant::Pi)
}

// ∫ η^{2k} w(η) dη
fn moment(family: ThetaFamily, k: usize, spec: &QuadratureSpec) -> Result<Estimate> {
    integrate_half_line(spec, |eta| {
        let power = Real::with_val(eta.prec(), Pow::pow(eta, 2 * k as u32));
        family.weight(eta) * power
    })
}

// ∫ η^{2k} / (z² + η²) w(η) dη
fn damped_moment(family: ThetaFamily, k: usize, z: &Real, spec: &QuadratureSpec) -> Result<Estimate> {
    let z2 = Real::with_val(spec.work(), z.square_ref());
    integrate_half_line(spec, |eta| {
        let w = eta.prec();
        let power = Real::with_val(w, Pow::pow(eta, 2 * k as u32));
        let denom = Real::with_val(w, eta.square_ref()) + &z2;
        family.weight(eta) * power / denom
    })
}

fn scaled(estimate: Estimate, factor: &Real, precision: u32) -> Estimate {
    Estimate {
        value: Real::with_val(precision, &estimate.value * factor),
        error: Real::with_val(precision, &estimate.error * factor.clone().abs()),
    }
}

/// Binet's function J(z) = (z/π) ∫ w_θ(η) / (η² + z²) dη.
pub fn binet_j(z: &Real, spec: &QuadratureSpec) -> Result<Estimate> {
    remainder_quadrature(ThetaFamily::Theta, 0, z, spec)
}

/// J̃(z) = J(2z) - 2J(z) = (z/π) ∫ ln tanh(πη) / (η² + z²) dη.
pub fn binet_j_tilde(z: &Real, spec: &QuadratureSpec) -> Result<Estimate> {
    remainder_quadrature(ThetaFamily::ThetaTilde, 0, z, spec)
}

/// θ-ratio z² ∫ η^{2k} w / (z² + η²) ÷ ∫ η^{2k} w, which lies in (0, 1) for
/// real z > 0. The error estimate adds the relative errors of both integrals.
pub fn theta_ratio(family: ThetaFamily, k: usize, z: &Real, spec: &QuadratureSpec) -> Result<Estimate> {
    check_argument(z)?;
    let num = damped_moment(family, k, z, spec)?;
    let den = moment(family, k, spec)?;
    let work = spec.work();
    let z2 = Real::with_val(work, z.square_ref());
    let value = Real::with_val(work, &num.value * &z2) / &den.value;
    let relative = num.relative_error() + den.relative_error();
    Ok(Estimate {
        error: Real::with_val(spec.precision(), relative * value.clone().abs()),
        value: Real::with_val(spec.precision(), value),
    })
}

/// The signed remainder after `k` terms, r_k(z), r̃_k(z) or r̂_k(z).
pub fn remainder_quadrature(family: ThetaFamily, k: usize, z: &Real, spec: &QuadratureSpec) -> Result<Estimate> {
    check_argument(z)?;
    let integral = damped_moment(family, k, z, spec)?;
    let work = spec.work();
    let power = Real::with_val(work, Pow::pow(z, 2 * k as i32 - 1));
    let mut factor = Real::with_val(work, 1) / (pi(spec) * power);
    if family.series_kind().term_sign(k) == Sign::Minus {
        factor = -factor;
    }
    Ok(scaled(integral, &factor, spec.precision()))
}

/// (1/π) ∫ η^{2k} w(η) dη, which equals β_k, β̃_k or β̂_k.
pub fn coefficient_quadrature(family: ThetaFamily, k: usize, spec: &QuadratureSpec) -> Result<Estimate> {
    let integral = moment(family, k, spec)?;
    let factor = Real::with_val(spec.work(), 1) / pi(spec);
    Ok(scaled(integral, &factor, spec.precision()))
}
