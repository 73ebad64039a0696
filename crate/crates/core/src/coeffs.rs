//! Exact rational coefficients of the three expansions.
//!
//! Everything here is exact: Bernoulli numbers come from the classical
//! recurrence `Σ_{j=0}^{n} C(n+1, j) B_j = 0` and the families β, β̃ and β̂
//! are rational multiples of them. Only [`zeta_even`] leaves the rationals.

use std::fmt;
use std::sync::{OnceLock, RwLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Integer, Rational as BigRational};

use crate::{check_precision, Real, Result, GUARD_BITS};

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Coefficient families handled by [`CoefficientTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// β_k = (-1)^k B_{2k+2} / ((2k+1)(2k+2)), Binet's function.
    Beta,
    /// β̃_k = (2 - 2^{-2k-1}) β_k, central binomial coefficients.
    BetaTilde,
    /// β̂_k = (1 - 2^{-2k-1}) β_k, ln Γ(z + ½) and de Moivre.
    BetaHat,
    /// B_{2m} stored at index m (so index 0 holds B_0 = 1).
    BernoulliEven,
}

impl Family {
    pub fn coefficient(self, k: usize) -> Rational {
        match self {
            Family::Beta => beta(k),
            Family::BetaTilde => beta_tilde(k),
            Family::BetaHat => beta_hat(k),
            Family::BernoulliEven => bernoulli_even(k),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Beta => "beta",
            Family::BetaTilde => "beta-tilde",
            Family::BetaHat => "beta-hat",
            Family::BernoulliEven => "bernoulli-even",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A growable, append-only list of coefficients of one family.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    family: Family,
    values: Vec<Rational>,
}

impl CoefficientTable {
    pub fn new(family: Family) -> Self {
        CoefficientTable {
            family,
            values: Vec::new(),
        }
    }

    /// Table holding indices `0..count`.
    pub fn generate(family: Family, count: usize) -> Self {
        let mut table = Self::new(family);
        table.extend_to(count);
        table
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Returns entry `k`, computing any missing entries first.
    pub fn get(&mut self, k: usize) -> &Rational {
        self.extend_to(k + 1);
        &self.values[k]
    }

    fn extend_to(&mut self, count: usize) {
        for k in self.values.len()..count {
            self.values.push(self.family.coefficient(k));
        }
    }
}

// B_{2i} at index i.
fn bernoulli_table() -> &'static RwLock<Vec<Rational>> {
    static TABLE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![Rational::from(1)]))
}

/// The Bernoulli number B_{2m}, exact. `m = 0` gives B_0 = 1.
///
/// Values are memoized in a process-wide table that only ever grows.
pub fn bernoulli_even(m: usize) -> Rational {
    {
        let table = bernoulli_table().read().unwrap_or_else(|e| e.into_inner());
        if let Some(b) = table.get(m) {
            return b.clone();
        }
    }
    let mut table = bernoulli_table().write().unwrap_or_else(|e| e.into_inner());
    while table.len() <= m {
        let next = next_even_bernoulli(&table);
        table.push(next);
    }
    table[m].clone()
}

// Given B_0, B_2, ..., B_{n-2} (n = 2 * evens.len()), solve the recurrence
// for B_n. Odd-index terms vanish except B_1 = -1/2.
fn next_even_bernoulli(evens: &[Rational]) -> Rational {
    let n = 2 * evens.len() as u32;
    let mut sum = Rational::from((-(i64::from(n) + 1), 2));
    for (i, b) in evens.iter().enumerate() {
        let c = Integer::from(Integer::binomial_u(n + 1, 2 * i as u32));
        sum += b * Rational::from(c);
    }
    -sum / (n + 1)
}

/// β_k = (-1)^k B_{2k+2} / ((2k+1)(2k+2)), strictly positive.
pub fn beta(k: usize) -> Rational {
    let b = bernoulli_even(k + 1);
    let k = k as u64;
    let denom = Integer::from((2 * k + 1) * (2 * k + 2));
    let value = b / Rational::from(denom);
    if k.is_multiple_of(2) {
        value
    } else {
        -value
    }
}

// 2^{-2k-1} as an exact rational.
fn inverse_power_of_two(k: usize) -> Rational {
    Rational::from((1, Integer::from(1) << (2 * k as u32 + 1)))
}

/// β̃_k = (2 - 2^{-2k-1}) β_k.
pub fn beta_tilde(k: usize) -> Rational {
    (Rational::from(2) - inverse_power_of_two(k)) * beta(k)
}

/// β̂_k = (1 - 2^{-2k-1}) β_k.
pub fn beta_hat(k: usize) -> Rational {
    (Rational::from(1) - inverse_power_of_two(k)) * beta(k)
}

/// ζ(2k + 2) at `precision` bits, recovered from the exact β_k through
/// ζ(2k+2) = β_k (2π)^{2k+2} / (2 (2k)!).
pub fn zeta_even(k: usize, precision: u32) -> Result<Real> {
    check_precision(precision)?;
    let work = precision + GUARD_BITS;
    let two_pi = Real::with_val(work, Constant::Pi) * 2u32;
    let power = two_pi.pow(2 * k as u32 + 2);
    let factorial = Integer::from(Integer::factorial(2 * k as u32)) * 2u32;
    let value = Real::with_val(work, &beta(k)) * power / factorial;
    Ok(Real::with_val(precision, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn bernoulli_small() {
        assert_eq!(bernoulli_even(0), q(1, 1));
        assert_eq!(bernoulli_even(1), q(1, 6));
        assert_eq!(bernoulli_even(2), q(-1, 30));
        assert_eq!(bernoulli_even(3), q(1, 42));
        assert_eq!(bernoulli_even(6), q(-691, 2730));
    }

    #[test]
    fn bernoulli_full_recurrence_holds() {
        // Check Σ_{j=0}^{n} C(n+1, j) B_j = 0 including the odd terms.
        for n in 1..=30u32 {
            let mut sum = Rational::new();
            for j in 0..=n {
                let bj = if j == 1 {
                    q(-1, 2)
                } else if j % 2 == 1 {
                    Rational::new()
                } else {
                    bernoulli_even(j as usize / 2)
                };
                sum += bj * Rational::from(Integer::from(Integer::binomial_u(n + 1, j)));
            }
            assert_eq!(sum, 0, "n = {n}");
        }
    }

    #[test]
    fn table_examples() {
        assert_eq!(beta(0), q(1, 12));
        assert_eq!(beta(1), q(1, 360));
        assert_eq!(beta(5), q(691, 360360));
        assert_eq!(beta_tilde(0), q(1, 8));
        assert_eq!(beta_tilde(3), q(17, 14336));
        assert_eq!(beta_tilde(6), q(5461, 425984));
        assert_eq!(beta_hat(0), q(1, 24));
        assert_eq!(beta_hat(1), q(7, 2880));
        assert_eq!(beta_hat(6), q(8191, 1277952));
    }

    #[test]
    fn closed_form_of_beta_tilde() {
        // β̃_k = (-1)^k (1 - 4^{-k-1}) B_{2k+2} / ((k+1)(2k+1))
        for k in 0..20usize {
            let four = Rational::from(4).pow(-(k as i32) - 1);
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let expected = (Rational::from(1) - four) * bernoulli_even(k + 1) * sign
                / Rational::from(((k + 1) * (2 * k + 1)) as u64);
            assert_eq!(beta_tilde(k), expected);
        }
    }

    #[test]
    fn table_grows_and_keeps_values() {
        let mut table = CoefficientTable::new(Family::BetaHat);
        assert!(table.is_empty());
        assert_eq!(*table.get(2), q(31, 40320));
        assert_eq!(table.len(), 3);
        let first = table.values()[0].clone();
        table.get(10);
        assert_eq!(table.values()[0], first);
        assert_eq!(table.family(), Family::BetaHat);
    }

    #[test]
    fn concurrent_readers_agree() {
        let handles: Vec<_> = (0..4)
            .map(|t| std::thread::spawn(move || (0..40).map(|k| beta(k + t)).collect::<Vec<_>>()))
            .collect();
        for (t, h) in handles.into_iter().enumerate() {
            for (k, value) in h.join().unwrap().into_iter().enumerate() {
                assert_eq!(value, beta(k + t));
            }
        }
    }

    #[test]
    fn zeta_matches_pi_powers() {
        let p = 256;
        let pi = Real::with_val(p + 64, Constant::Pi);
        let z2 = zeta_even(0, p).unwrap();
        let z4 = zeta_even(1, p).unwrap();
        let z6 = zeta_even(2, p).unwrap();
        let tol = Real::with_val(p, 1) >> (p - 4);
        let e2 = Real::with_val(p, pi.clone().pow(2u32) / 6u32);
        let e4 = Real::with_val(p, pi.clone().pow(4u32) / 90u32);
        let e6 = Real::with_val(p, pi.pow(6u32) / 945u32);
        assert!(Real::with_val(p, &z2 - &e2).abs() < tol);
        assert!(Real::with_val(p, &z4 - &e4).abs() < tol);
        assert!(Real::with_val(p, &z6 - &e6).abs() < tol);
    }

    #[test]
    fn zeta_rejects_low_precision() {
        assert!(zeta_even(0, 32).is_err());
    }
}
