//! Cross-checks of the series against the oracles, run by `envelope verify`.

use std::thread;

use rug::{Integer, Rational};

use crate::coeffs::{bernoulli_even, beta, beta_hat, beta_tilde};
use crate::demo::{linear_grid, scan_envelope_violations};
use crate::oracle::{
    binet_j, binet_j_tilde, coefficient_quadrature, exact_series_value, remainder_quadrature, theta_ratio,
    QuadratureSpec, ThetaFamily,
};
use crate::series::{Evaluator, SeriesKind, Sign, Truncation};
use crate::{Real, Result, DEFAULT_PRECISION};

/// Relative agreement required between coefficient quadratures and the
/// exact rationals.
pub const COEFFICIENT_QUADRATURE_TOLERANCE: f64 = 1e-25;

/// Required ratio of containment margin to oracle error.
pub const MARGIN_FACTOR: u32 = 10;

/// β_k, β̃_k, β̂_k for k = 0..=6 as published.
pub const REFERENCE_TABLE: [[(u64, u64); 3]; 7] = [
    [(1, 12), (1, 8), (1, 24)],
    [(1, 360), (1, 192), (7, 2880)],
    [(1, 1260), (1, 640), (31, 40320)],
    [(1, 1680), (17, 14336), (127, 215040)],
    [(1, 1188), (31, 18432), (511, 608256)],
    [(691, 360360), (691, 180224), (1414477, 738017280)],
    [(1, 156), (5461, 425984), (8191, 1277952)],
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Grid sizes and precision for one verification run.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub precision: u32,
    /// Arguments as 2z, so half-integers stay exact.
    pub twice_z: Vec<u64>,
    pub max_k: usize,
    pub identity_k: usize,
    pub staudt_m: usize,
    pub quadrature_k: usize,
    pub theta_k: usize,
    pub theta_z: Vec<f64>,
}

impl VerifyConfig {
    pub fn standard() -> Self {
        VerifyConfig {
            precision: DEFAULT_PRECISION,
            twice_z: vec![1, 2, 4, 10, 20, 60],
            max_k: 8,
            identity_k: 50,
            staudt_m: 25,
            quadrature_k: 4,
            theta_k: 2,
            theta_z: vec![0.5, 1.0, 5.0, 20.0],
        }
    }

    pub fn deep() -> Self {
        VerifyConfig {
            precision: 512,
            twice_z: vec![1, 2, 3, 4, 7, 10, 20, 60, 100],
            max_k: 12,
            identity_k: 100,
            staudt_m: 60,
            quadrature_k: 8,
            theta_k: 4,
            theta_z: vec![0.5, 1.0, 5.0, 20.0, 100.0],
        }
    }
}

type Check = fn(&VerifyConfig) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 14] = [
    ("reference-table", reference_table),
    ("coefficient-identities", coefficient_identities),
    ("von-staudt-clausen", von_staudt_clausen),
    ("coefficient-quadrature", coefficient_quadrature_check),
    ("weight-dependence", weight_dependence),
    ("theta-containment", theta_containment),
    ("remainder-identity", remainder_identity),
    ("binet-quadrature", binet_quadrature),
    ("j-tilde-decomposition", j_tilde_decomposition),
    ("bracketing-grid", bracketing_grid),
    ("sign-alternation", sign_alternation),
    ("nesting", nesting),
    ("ratio-consistency", ratio_consistency),
    ("unperturbed-control", unperturbed_control),
];

/// Runs every check; with `parallel` the checks run on separate threads.
pub fn run_checks(config: &VerifyConfig, parallel: bool) -> Vec<CheckOutcome> {
    let run = |(name, check): &(&'static str, Check)| {
        let (passed, detail) = match check(config) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        CheckOutcome { name, passed, detail }
    };
    if parallel {
        thread::scope(|s| {
            let handles: Vec<_> = CHECKS.iter().map(|c| s.spawn(move || run(c))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("check panicked"))
                .collect()
        })
    } else {
        CHECKS.iter().map(run).collect()
    }
}

fn q((n, d): (u64, u64)) -> Rational {
    Rational::from((n, d))
}

fn reference_table(_: &VerifyConfig) -> Result<(bool, String)> {
    let mut mismatches = Vec::new();
    for (k, row) in REFERENCE_TABLE.iter().enumerate() {
        let computed = [beta(k), beta_tilde(k), beta_hat(k)];
        for (family, (got, want)) in computed.iter().zip(row.iter()).enumerate() {
            if *got != q(*want) {
                mismatches.push(format!("k={k} family={family}: {got}"));
            }
        }
    }
    Ok((mismatches.is_empty(), format!("21 entries, {} mismatches {:?}", mismatches.len(), mismatches)))
}

fn coefficient_identities(config: &VerifyConfig) -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for k in 0..=config.identity_k {
        let (b, bt, bh) = (beta(k), beta_tilde(k), beta_hat(k));
        let factor = Rational::from(2) - Rational::from((1, Integer::from(1) << (2 * k as u32 + 1)));
        let ok = bt == Rational::from(&b + &bh) && bt == Rational::from(&b * &factor) && b > 0 && bt > 0 && bh > 0;
        if !ok {
            bad.push(k);
        }
    }
    Ok((bad.is_empty(), format!("k ≤ {}, failures at {bad:?}", config.identity_k)))
}

/// Product of the primes p with (p - 1) | 2m.
pub fn staudt_clausen_denominator(m: usize) -> Integer {
    let n = 2 * m as u64;
    let mut product = Integer::from(1);
    for d in 1..=n {
        if n.is_multiple_of(d) && is_prime(d + 1) {
            product *= d + 1;
        }
    }
    product
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn von_staudt_clausen(config: &VerifyConfig) -> Result<(bool, String)> {
    let bad: Vec<usize> = (1..=config.staudt_m)
        .filter(|&m| *bernoulli_even(m).denom() != staudt_clausen_denominator(m))
        .collect();
    Ok((bad.is_empty(), format!("m ≤ {}, failures at {bad:?}", config.staudt_m)))
}

fn coefficient_quadrature_check(config: &VerifyConfig) -> Result<(bool, String)> {
    let spec = QuadratureSpec::new(config.precision)?;
    let mut worst = Real::with_val(64, 0);
    for family in ThetaFamily::ALL {
        for k in 0..=config.quadrature_k {
            let est = coefficient_quadrature(family, k, &spec)?;
            let exact = Real::with_val(config.precision, &family.coefficient_family().coefficient(k));
            let rel = Real::with_val(64, (est.value - &exact) / exact).abs();
            if rel > worst {
                worst = rel;
            }
        }
    }
    Ok((
        worst <= COEFFICIENT_QUADRATURE_TOLERANCE,
        format!("worst relative error {}", worst.to_string_radix(10, Some(4))),
    ))
}

fn weight_dependence(config: &VerifyConfig) -> Result<(bool, String)> {
    let w = config.precision + 32;
    let mut worst = Real::with_val(64, 0);
    for eta in [0.1, 0.5, 1.0, 2.0] {
        let eta = Real::with_val(w, eta);
        let lhs = ThetaFamily::Theta.weight(&eta) + ThetaFamily::ThetaHat.weight(&eta);
        let rhs = ThetaFamily::ThetaTilde.weight(&eta);
        let rel = Real::with_val(64, (lhs - &rhs) / rhs).abs();
        if rel > worst {
            worst = rel;
        }
    }
    let tol = Real::with_val(64, 1) >> config.precision;
    Ok((worst <= tol, format!("worst relative mismatch {}", worst.to_string_radix(10, Some(4)))))
}

fn theta_containment(config: &VerifyConfig) -> Result<(bool, String)> {
    let spec = QuadratureSpec::new(config.precision)?;
    let mut failures = Vec::new();
    let mut count = 0;
    for family in ThetaFamily::ALL {
        for k in 0..=config.theta_k {
            for &z in &config.theta_z {
                let theta = theta_ratio(family, k, &Real::with_val(config.precision, z), &spec)?;
                count += 1;
                let above = Real::with_val(config.precision, &theta.value - &theta.error) > 0;
                let below = Real::with_val(config.precision, &theta.value + &theta.error) < 1;
                if !(above && below) {
                    failures.push(format!("{family} k={k} z={z}: {}", theta.value.to_f64()));
                }
            }
        }
    }
    Ok((failures.is_empty(), format!("{count} ratios, failures {failures:?}")))
}

fn remainder_identity(config: &VerifyConfig) -> Result<(bool, String)> {
    let spec = QuadratureSpec::new(config.precision)?;
    let p = config.precision;
    let mut failures = Vec::new();
    for family in ThetaFamily::ALL {
        for k in 0..=config.theta_k {
            for &z in &config.theta_z {
                let z = Real::with_val(p, z);
                let r = remainder_quadrature(family, k, &z, &spec)?;
                let theta = theta_ratio(family, k, &z, &spec)?;
                let coef = Real::with_val(p, &family.coefficient_family().coefficient(k));
                let term = coef / Real::with_val(p, rug::ops::Pow::pow(&z, 2 * k as u32 + 1));
                let mut predicted = theta.value * term;
                if family.series_kind().term_sign(k) == Sign::Minus {
                    predicted = -predicted;
                }
                let diff = Real::with_val(p, &r.value - &predicted).abs();
                let tol = Real::with_val(p, &r.error * MARGIN_FACTOR)
                    + Real::with_val(p, &theta.error * MARGIN_FACTOR) * predicted.abs()
                    + (Real::with_val(p, r.value.clone().abs()) >> (p / 2));
                if diff > tol {
                    failures.push(format!("{family} k={k} z={}", z.to_f64()));
                }
            }
        }
    }
    Ok((failures.is_empty(), format!("failures {failures:?}")))
}

fn binet_quadrature(config: &VerifyConfig) -> Result<(bool, String)> {
    let spec = QuadratureSpec::new(config.precision)?;
    let mut failures = Vec::new();
    for &tz in &config.twice_z {
        let z = Real::with_val(config.precision, tz) / 2u32;
        let quad = binet_j(&z, &spec)?;
        let exact = exact_series_value(SeriesKind::BinetJ, tz, config.precision)?;
        let diff = Real::with_val(config.precision, &quad.value - &exact.value).abs();
        if diff > Real::with_val(config.precision, &quad.error + &exact.error) * MARGIN_FACTOR {
            failures.push(z.to_f64());
        }
    }
    Ok((failures.is_empty(), format!("{} arguments, failures {failures:?}", config.twice_z.len())))
}

fn j_tilde_decomposition(config: &VerifyConfig) -> Result<(bool, String)> {
    let spec = QuadratureSpec::new(config.precision)?;
    let p = config.precision;
    let mut failures = Vec::new();
    for z in [1u32, 2, 5] {
        let zr = Real::with_val(p, z);
        let tilde = binet_j_tilde(&zr, &spec)?;
        let j2 = binet_j(&Real::with_val(p, 2 * z), &spec)?;
        let j1 = binet_j(&zr, &spec)?;
        let combined = Real::with_val(p, &j2.value - Real::with_val(p, &j1.value * 2u32));
        let diff = Real::with_val(p, &tilde.value - &combined).abs();
        let tol = (Real::with_val(p, &tilde.error + &j2.error) + Real::with_val(p, &j1.error * 2u32)) * MARGIN_FACTOR;
        if diff > tol {
            failures.push(z);
        }
    }
    Ok((failures.is_empty(), format!("z ∈ {{1, 2, 5}}, failures {failures:?}")))
}

fn grid_kinds(twice_z: u64) -> impl Iterator<Item = SeriesKind> {
    SeriesKind::ALL
        .into_iter()
        .filter(move |&kind| kind != SeriesKind::DeMoivre || twice_z.is_multiple_of(2))
}

// z for a grid entry; de Moivre takes n = z.
fn grid_argument(twice_z: u64, precision: u32) -> Real {
    Real::with_val(precision, twice_z) / 2u32
}

fn bracketing_grid(config: &VerifyConfig) -> Result<(bool, String)> {
    let ev = Evaluator::new(config.precision)?;
    let p = config.precision;
    let mut checks = 0;
    let mut failures = Vec::new();
    for &tz in &config.twice_z {
        for kind in grid_kinds(tz) {
            let truth = exact_series_value(kind, tz, p)?;
            let z = grid_argument(tz, p);
            for k in 0..=config.max_k {
                let iv = ev.envelope_interval(kind, &z, k)?;
                checks += 1;
                let below = Real::with_val(p, &truth.value - &iv.lo);
                let above = Real::with_val(p, &iv.hi - &truth.value);
                let margin = if below < above { below } else { above };
                if margin < Real::with_val(p, &truth.error * MARGIN_FACTOR) {
                    failures.push(format!("{kind} z={} k={k}", z.to_f64()));
                }
            }
        }
    }
    Ok((failures.is_empty(), format!("{checks} containment checks, failures {failures:?}")))
}

fn sign_alternation(config: &VerifyConfig) -> Result<(bool, String)> {
    let ev = Evaluator::new(config.precision)?;
    let p = config.precision;
    let mut compared = 0;
    let mut failures = Vec::new();
    for &tz in &config.twice_z {
        for kind in grid_kinds(tz) {
            let truth = exact_series_value(kind, tz, p)?;
            let z = grid_argument(tz, p);
            for k in 0..=config.max_k {
                let remainder = Real::with_val(p, &truth.value - ev.partial_sum(kind, &z, k)?);
                if remainder.clone().abs() < Real::with_val(p, &truth.error * MARGIN_FACTOR) {
                    continue;
                }
                compared += 1;
                if Sign::of(&remainder) != Some(kind.term_sign(k)) {
                    failures.push(format!("{kind} z={} k={k}", z.to_f64()));
                }
            }
        }
    }
    Ok((failures.is_empty(), format!("{compared} signs compared, failures {failures:?}")))
}

fn nesting(config: &VerifyConfig) -> Result<(bool, String)> {
    let ev = Evaluator::new(config.precision)?;
    let mut compared = 0;
    let mut failures = Vec::new();
    for &tz in &config.twice_z {
        for kind in grid_kinds(tz) {
            let z = grid_argument(tz, config.precision);
            let k_star = ev.min_term_index(kind, &z)?;
            for k in 0..k_star.min(config.max_k) {
                compared += 1;
                let outer = ev.envelope_interval(kind, &z, k)?;
                let inner = ev.envelope_interval(kind, &z, k + 1)?;
                if !inner.is_within(&outer) {
                    failures.push(format!("{kind} z={} k={k}", z.to_f64()));
                }
            }
        }
    }
    Ok((failures.is_empty(), format!("{compared} nested pairs, failures {failures:?}")))
}

fn ratio_consistency(config: &VerifyConfig) -> Result<(bool, String)> {
    let ev = Evaluator::new(config.precision)?;
    let p = config.precision;
    let mut failures = Vec::new();
    for z in [2u64, 5, 10] {
        let zr = Real::with_val(p, z);
        let truth = exact_series_value(SeriesKind::CentralBinomial, 2 * z, p)?;
        let half_ln_z = Real::with_val(p + 64, z).ln() / 2u32;
        let slack = Real::with_val(p, 1) >> (p - 8);
        for k in 0..4 {
            let a = ev.ln_gamma_plus_half(&zr, &Truncation::Terms(k))?;
            let b = ev.ln_gamma(&zr, &Truncation::Terms(k))?;
            let lo = Real::with_val(p + 64, a.lo() - b.hi()) - &half_ln_z - &slack;
            let hi = Real::with_val(p + 64, a.hi() - b.lo()) - &half_ln_z + &slack;
            if !(lo <= truth.value && truth.value <= hi) {
                failures.push(format!("z={z} k={k}"));
            }
        }
    }
    Ok((failures.is_empty(), format!("z ∈ {{2, 5, 10}}, failures {failures:?}")))
}

fn unperturbed_control(config: &VerifyConfig) -> Result<(bool, String)> {
    let spec = QuadratureSpec::new(config.precision)?;
    let p = config.precision;
    let grid = linear_grid(&Real::with_val(p, 5), &Real::with_val(p, 20), 15, p);
    let witnesses = scan_envelope_violations(None, &grid, 5, &spec)?;
    Ok((witnesses.is_empty(), format!("{} witnesses for J itself", witnesses.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Family;

    #[test]
    fn staudt_clausen_small() {
        assert_eq!(staudt_clausen_denominator(1), 6);
        assert_eq!(staudt_clausen_denominator(2), 30);
        assert_eq!(staudt_clausen_denominator(6), 2730);
    }

    #[test]
    fn family_of_table_columns() {
        assert_eq!(Family::Beta.coefficient(4), q(REFERENCE_TABLE[4][0]));
        assert_eq!(Family::BetaTilde.coefficient(4), q(REFERENCE_TABLE[4][1]));
        assert_eq!(Family::BetaHat.coefficient(4), q(REFERENCE_TABLE[4][2]));
    }
}
