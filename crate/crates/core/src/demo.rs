//! A function with the same asymptotic series as J(x) that the series does
//! *not* envelop: f(x) = J(x) + e^{-bx} with 0 < b < 2π.
//!
//! The perturbation is smaller than every power of 1/x, so the series is
//! still asymptotic to f, but it decays more slowly than the smallest term
//! of the series (about e^{-2πx}). A finite scan can exhibit concrete
//! (x, k) pairs where the remainder escapes the bound; it cannot prove that
//! none exist, so an empty scan is reported rather than treated as failure.

use std::cmp::Ordering;
use std::fmt;

use rug::float::Constant;

use crate::oracle::{binet_j, Estimate, QuadratureSpec};
use crate::series::{Evaluator, SeriesKind, Sign};
use crate::{Error, Real, Result};

/// Violations are reported only when they exceed the oracle error estimate
/// by this factor.
pub const MARGIN_FACTOR: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationMode {
    MagnitudeExceeded,
    SignMismatch,
}

impl ViolationMode {
    pub fn name(self) -> &'static str {
        match self {
            ViolationMode::MagnitudeExceeded => "magnitude_exceeded",
            ViolationMode::SignMismatch => "sign_mismatch",
        }
    }
}

impl fmt::Display for ViolationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point where truncating after `k` terms is not bracketed by term `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationWitness {
    pub x: Real,
    pub k: usize,
    /// f(x) minus the sum of terms `0..k`.
    pub remainder: Real,
    /// |term k|
    pub next_term_bound: Real,
    pub mode: ViolationMode,
    /// Error estimate of `remainder`.
    pub error: Real,
}

fn check_rate(b: &Real) -> Result<()> {
    let two_pi = Real::with_val(b.prec() + 64, Constant::Pi) * 2u32;
    if b.is_finite() && *b > 0 && *b < two_pi {
        Ok(())
    } else {
        Err(Error::Domain(format!("b must lie in (0, 2π), got {}", b.to_f64())))
    }
}

/// f(x) = J(x) + e^{-bx}.
pub fn perturbed_binet(x: &Real, b: &Real, spec: &QuadratureSpec) -> Result<Estimate> {
    check_rate(b)?;
    let j = binet_j(x, spec)?;
    let work = spec.precision() + 32;
    let bump = Real::with_val(work, -Real::with_val(work, b * x)).exp();
    Ok(Estimate {
        value: Real::with_val(spec.precision(), j.value + bump),
        error: j.error,
    })
}

/// First (x, k) pair, scanning x in grid order and k = 0..=k_max, where
/// the Binet series fails to envelop f(x) = J(x) + e^{-bx}.
pub fn find_envelope_violation(
    b: &Real,
    grid: &[Real],
    k_max: usize,
    spec: &QuadratureSpec,
) -> Result<Option<ViolationWitness>> {
    check_rate(b)?;
    check_scan(grid, k_max)?;
    for x in grid {
        let f = perturbed_binet(x, b, spec)?;
        if let Some(w) = check_point(x, &f, k_max, spec)?.into_iter().next() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Every violating (x, k) pair for f(x) = J(x) + e^{-bx}, or for J itself
/// when `b` is `None`.
pub fn scan_envelope_violations(
    b: Option<&Real>,
    grid: &[Real],
    k_max: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<ViolationWitness>> {
    if let Some(b) = b {
        check_rate(b)?;
    }
    check_scan(grid, k_max)?;
    let mut witnesses = Vec::new();
    for x in grid {
        let f = match b {
            Some(b) => perturbed_binet(x, b, spec)?,
            None => binet_j(x, spec)?,
        };
        witnesses.extend(check_point(x, &f, k_max, spec)?);
    }
    Ok(witnesses)
}

fn check_scan(grid: &[Real], k_max: usize) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("the x grid is empty".into()));
    }
    if k_max < 1 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    Ok(())
}

fn check_point(x: &Real, f: &Estimate, k_max: usize, spec: &QuadratureSpec) -> Result<Vec<ViolationWitness>> {
    let evaluator = Evaluator::new(spec.precision())?;
    let p = spec.precision();
    let mut found = Vec::new();
    for k in 0..=k_max {
        let sum = evaluator.partial_sum(SeriesKind::BinetJ, x, k)?;
        let term = evaluator.term(SeriesKind::BinetJ, k, x)?;
        let remainder = Real::with_val(p, &f.value - &sum);
        // Quadrature estimate plus a few ulps for the subtraction.
        let error = Real::with_val(p, &f.error + (Real::with_val(p, f.value.clone().abs()) >> (p - 4)));
        let margin = Real::with_val(p, &error * MARGIN_FACTOR);
        let excess = Real::with_val(p, remainder.clone().abs() - term.clone().abs());
        let mode = if excess > margin {
            Some(ViolationMode::MagnitudeExceeded)
        } else if Sign::of(&remainder) != Sign::of(&term)
            && remainder.cmp_abs(&margin) == Some(Ordering::Greater)
        {
            Some(ViolationMode::SignMismatch)
        } else {
            None
        };
        if let Some(mode) = mode {
            found.push(ViolationWitness {
                x: x.clone(),
                k,
                remainder,
                next_term_bound: term.abs(),
                mode,
                error,
            });
        }
    }
    Ok(found)
}

/// `steps + 1` evenly spaced points from `from` to `to`.
pub fn linear_grid(from: &Real, to: &Real, steps: usize, precision: u32) -> Vec<Real> {
    if steps == 0 {
        return vec![Real::with_val(precision, from)];
    }
    let span = Real::with_val(precision, to - from);
    (0..=steps)
        .map(|i| Real::with_val(precision, from + Real::with_val(precision, &span * i as u32) / steps as u32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(x: f64) -> Real {
        Real::with_val(256, x)
    }

    #[test]
    fn rate_must_be_inside_open_interval() {
        let spec = QuadratureSpec::default();
        let two_pi = Real::with_val(256, Constant::Pi) * 2u32;
        let just_below = Real::with_val(256, &two_pi - 1e-10);
        assert!(perturbed_binet(&real(1.0), &just_below, &spec).is_ok());
        let above = Real::with_val_round(256, Real::with_val(512, Constant::Pi) * 2u32, rug::float::Round::Up).0;
        assert!(perturbed_binet(&real(1.0), &above, &spec).is_err());
        assert!(perturbed_binet(&real(1.0), &real(0.0), &spec).is_err());
        assert!(perturbed_binet(&real(1.0), &real(7.0), &spec).is_err());
        assert!(perturbed_binet(&real(0.0), &real(1.0), &spec).is_err());
    }

    #[test]
    fn perturbation_adds_exponential() {
        let spec = QuadratureSpec::default();
        let f = perturbed_binet(&real(10.0), &real(1.0), &spec).unwrap();
        let j = binet_j(&real(10.0), &spec).unwrap();
        let diff = Real::with_val(256, &f.value - &j.value);
        let expected = real(-10.0).exp();
        assert!(Real::with_val(256, &diff - &expected).abs() < 1e-40);
    }

    #[test]
    fn scan_preconditions() {
        let spec = QuadratureSpec::default();
        assert!(find_envelope_violation(&real(1.0), &[], 3, &spec).is_err());
        assert!(find_envelope_violation(&real(1.0), &[real(5.0)], 0, &spec).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = linear_grid(&real(5.0), &real(20.0), 15, 256);
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 5);
        assert_eq!(g[5], 10);
        assert_eq!(g[15], 20);
    }
}
