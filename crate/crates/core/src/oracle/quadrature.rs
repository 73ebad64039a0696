//! Double-exponential quadrature on (0, ∞).
//!
//! The substitution η = exp(π/2 · sinh t) maps the real t-line onto (0, ∞)
//! and makes an integrand with a logarithmic singularity at 0 and
//! exponential decay at ∞ decay double-exponentially in both directions,
//! so the trapezoidal rule in t converges geometrically in 1/h. Each level
//! halves h and reuses the previous nodes; η = 0 is never sampled.

use rug::float::Constant;

use crate::{check_precision, Error, Real, Result, GUARD_BITS};

/// Levels of step halving before giving up.
pub const MAX_LEVELS: u32 = 20;

// Refinement starts being trusted only from this level on.
const MIN_LEVELS: u32 = 3;

// Half-width of the t-window; far beyond any node with a visible
// contribution at the precisions in use.
const T_MAX: f64 = 12.0;

/// Precision and error target of a quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    precision: u32,
    target: Real,
    max_levels: u32,
}

impl QuadratureSpec {
    /// Precision `precision` bits with relative target 2^-(P/2).
    pub fn new(precision: u32) -> Result<Self> {
        check_precision(precision)?;
        let target = Real::with_val(precision, 1) >> (precision / 2);
        Self::with_target(precision, target)
    }

    /// The target must not ask for more than 2^-(P-32).
    pub fn with_target(precision: u32, target: Real) -> Result<Self> {
        check_precision(precision)?;
        let floor = Real::with_val(precision, 1) >> (precision - GUARD_BITS);
        if !target.is_finite() || target < floor || target >= 1 {
            return Err(Error::Domain(format!(
                "quadrature target {target} must lie in [2^-{}, 1)",
                precision - GUARD_BITS
            )));
        }
        Ok(QuadratureSpec {
            precision,
            target,
            max_levels: MAX_LEVELS,
        })
    }

    pub fn with_max_levels(mut self, levels: u32) -> Self {
        self.max_levels = levels.clamp(MIN_LEVELS, MAX_LEVELS);
        self
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn target(&self) -> &Real {
        &self.target
    }

    pub fn max_levels(&self) -> u32 {
        self.max_levels
    }

    pub(crate) fn work(&self) -> u32 {
        self.precision + GUARD_BITS
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::new(crate::DEFAULT_PRECISION).expect("default precision is valid")
    }
}

/// A value with an a-posteriori error estimate (not a proven bound).
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: Real,
    pub error: Real,
}

impl Estimate {
    pub fn relative_error(&self) -> Real {
        Real::with_val(self.error.prec(), &self.error / self.value.clone().abs())
    }
}

/// ∫_0^∞ f(η) dη for `f` analytic on (0, ∞), integrable at 0 and decaying
/// at least exponentially. `f` receives η at `spec.precision + 32` bits.
pub fn integrate_half_line<F>(spec: &QuadratureSpec, f: F) -> Result<Estimate>
where
    F: Fn(&Real) -> Real,
{
    let work = spec.work();
    let half_pi = Real::with_val(work, Constant::Pi) / 2u32;
    let cutoff = Real::with_val(work, 1) >> (spec.precision + GUARD_BITS);

    let node = |t: &Real| -> Real {
        let (sinh, cosh) = t.clone().sinh_cosh(Real::new(work));
        let eta = Real::with_val(work, &half_pi * &sinh).exp();
        let jacobian = Real::with_val(work, &half_pi * &cosh) * &eta;
        let fx = f(&eta);
        if fx.is_zero() {
            fx
        } else {
            fx * jacobian
        }
    };

    // Sum the nodes t = offset + i*stride for i = 0, 1, ... in one
    // direction until contributions fall below the cutoff relative to `scale`.
    let sweep = |offset: &Real, stride: &Real, sign: i32, scale: &Real| -> Real {
        let mut acc = Real::with_val(work, 0);
        let mut t = Real::with_val(work, offset);
        loop {
            if t.to_f64().abs() > T_MAX {
                break;
            }
            let v = node(&t);
            acc += &v;
            let reference = Real::with_val(work, scale.clone().abs() + acc.clone().abs());
            if v.abs() <= Real::with_val(work, &cutoff * &reference) && t.to_f64().abs() > 0.5 {
                break;
            }
            if sign > 0 {
                t += stride;
            } else {
                t -= stride;
            }
        }
        acc
    };

    // Level 0: h = 1, nodes at every integer.
    let zero = Real::with_val(work, 0);
    let one = Real::with_val(work, 1);
    let centre = node(&zero);
    let mut total = Real::with_val(work, &centre);
    let right = sweep(&one, &one, 1, &total);
    total += right;
    let left = sweep(&Real::with_val(work, -1), &one, -1, &total);
    total += left;

    let mut h = Real::with_val(work, 1);
    let mut previous = Real::with_val(work, &total);
    let mut last_difference = Real::with_val(spec.precision, f64::INFINITY);
    for level in 1..=spec.max_levels {
        h /= 2u32;
        let stride = Real::with_val(work, &h * 2u32);
        // New nodes: odd multiples of h.
        let right = sweep(&h, &stride, 1, &total);
        let left = sweep(&Real::with_val(work, -&h), &stride, -1, &total);
        total += right;
        total += left;
        let estimate = Real::with_val(work, &total * &h);
        let difference = Real::with_val(work, &estimate - &previous).abs();
        last_difference = Real::with_val(spec.precision, &difference);
        if level >= MIN_LEVELS
            && difference <= Real::with_val(work, spec.target() * estimate.clone().abs())
        {
            return Ok(Estimate {
                value: Real::with_val(spec.precision, &estimate),
                error: last_difference,
            });
        }
        previous = estimate;
    }
    Err(Error::QuadratureNonConvergence {
        levels: spec.max_levels,
        estimate: last_difference,
    })
}
