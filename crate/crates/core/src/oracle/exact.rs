use rug::float::Constant;
use rug::{Integer, Rational};

use super::Estimate;
use crate::series::SeriesKind;
use crate::{Error, Real, Result};

// Bits carried beyond the requested precision; covers the cancellation
// between ln Γ and its Stirling prefix for any argument we can represent.
const EXTRA_BITS: u32 = 64;

fn factorial(n: u64) -> Integer {
    let n = u32::try_from(n).expect("factorial argument fits in u32");
    Integer::from(Integer::factorial(n))
}

/// ln n! from the exact big integer n!.
pub fn exact_ln_factorial(n: u64, precision: u32) -> Real {
    Real::with_val(precision, Real::with_val(precision + EXTRA_BITS, &factorial(n)).ln())
}

/// ln C(2n, n) from the exact big integer C(2n, n).
pub fn exact_ln_central_binomial(n: u64, precision: u32) -> Real {
    let n = u32::try_from(n).expect("binomial argument fits in u32");
    let c = Integer::from(Integer::binomial_u(2 * n, n));
    Real::with_val(precision, Real::with_val(precision + EXTRA_BITS, &c).ln())
}

/// ln Γ(n + ½) = ln((2n)! / (4^n n!)) + ½ ln π.
pub fn exact_ln_gamma_half(n: u64, precision: u32) -> Real {
    let w = precision + EXTRA_BITS;
    let shift = u32::try_from(2 * n).expect("exponent fits in u32");
    let ratio = Rational::from((factorial(2 * n), factorial(n) << shift));
    let half_ln_pi = Real::with_val(w, Constant::Pi).ln() / 2u32;
    Real::with_val(precision, Real::with_val(w, &ratio).ln() + half_ln_pi)
}

/// ln Γ(m/2) for m ≥ 1.
pub fn exact_ln_gamma_of_half(m: u64, precision: u32) -> Real {
    assert!(m >= 1, "Γ has a pole at 0");
    if m.is_multiple_of(2) {
        exact_ln_factorial(m / 2 - 1, precision)
    } else {
        exact_ln_gamma_half(m / 2, precision)
    }
}

/// The function a series expands, at z = `twice_z` / 2, from exact
/// combinatorics:
///
/// * `BinetJ`: ln Γ(z) - (z-½) ln z + z - ½ ln 2π
/// * `CentralBinomial`: ln C(2z, z) - ln(4^z / √(πz)) for integer z, else
///   ln Γ(z+½) - ½ ln z - ln Γ(z)
/// * `GammaHalf`: ln Γ(z+½) - z ln z + z - ½ ln 2π
/// * `DeMoivre` (z = n must be an integer): the `GammaHalf` value at n + ½,
///   taken from the exact n!
///
/// The error estimate covers the rounding of every piece.
pub fn exact_series_value(kind: SeriesKind, twice_z: u64, precision: u32) -> Result<Estimate> {
    if twice_z == 0 {
        return Err(Error::Domain("z must be positive".into()));
    }
    let w = precision + EXTRA_BITS;
    let z = Real::with_val(w, twice_z) / 2u32;
    let half_ln_2pi = (Real::with_val(w, Constant::Pi) * 2u32).ln() / 2u32;
    let ln_z = Real::with_val(w, z.ln_ref());
    let integer = twice_z.is_multiple_of(2);

    // Pieces whose sum is the answer; each is correctly rounded at w bits
    // or the result of a couple of such operations.
    let pieces: Vec<Real> = match kind {
        SeriesKind::BinetJ => vec![
            exact_ln_gamma_of_half(twice_z, w),
            -Real::with_val(w, &z - 0.5) * &ln_z,
            z.clone(),
            -half_ln_2pi,
        ],
        SeriesKind::CentralBinomial if integer => {
            let n = twice_z / 2;
            vec![
                exact_ln_central_binomial(n, w),
                -Real::with_val(w, 4).ln() * &z,
                (Real::with_val(w, Constant::Pi) * &z).ln() / 2u32,
            ]
        }
        SeriesKind::CentralBinomial => vec![
            exact_ln_gamma_of_half(twice_z + 1, w),
            -ln_z / 2u32,
            -exact_ln_gamma_of_half(twice_z, w),
        ],
        SeriesKind::GammaHalf => vec![
            exact_ln_gamma_of_half(twice_z + 1, w),
            -Real::with_val(w, &z * &ln_z),
            z.clone(),
            -half_ln_2pi,
        ],
        SeriesKind::DeMoivre => {
            if !integer {
                return Err(Error::Domain("de Moivre's series needs an integer n".into()));
            }
            let x = Real::with_val(w, &z + 0.5);
            let ln_x = Real::with_val(w, x.ln_ref());
            vec![
                exact_ln_factorial(twice_z / 2, w),
                -Real::with_val(w, &x * ln_x),
                x,
                -half_ln_2pi,
            ]
        }
    };

    let mut sum = Real::with_val(w, 0);
    let mut magnitude = Real::with_val(w, 0);
    for p in &pieces {
        sum += p;
        magnitude += p.clone().abs();
    }
    let value = Real::with_val(precision, &sum);
    // Eight ulps of every piece at w bits, plus the final rounding.
    let error = (magnitude >> (w - 3)) + (Real::with_val(w, sum.clone().abs()) >> precision);
    Ok(Estimate {
        value,
        error: Real::with_val(precision, error),
    })
}
